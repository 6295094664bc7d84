#pragma once

#include <cstdint>

namespace wslat
{
    inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    /// Order-sensitive mix of several words into one seed.
    inline constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept
    {
        return splitmix64(h ^ (splitmix64(v) + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2)));
    }

    /// Counter-based stream: the i-th draw is a pure function of (key, i), so
    /// the whole generator state is the pair and can be saved and restored.
    class CounterRng
    {
    public:
        CounterRng() = default;
        explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
            : key_(key), counter_(counter) {}

        std::uint64_t next() noexcept
        {
            return splitmix64(splitmix64(key_) ^ (counter_++ * 0xd1b54a32d192ed03ULL));
        }

        /// Uniform integer in [0, bound); bound must be positive.
        /// Lemire's multiply-shift with rejection, so no modulo bias.
        std::uint64_t uniform(std::uint64_t bound) noexcept
        {
            unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
            auto low = static_cast<std::uint64_t>(m);
            if (low < bound)
            {
                const std::uint64_t threshold = (0 - bound) % bound;
                while (low < threshold)
                {
                    m = static_cast<unsigned __int128>(next()) * bound;
                    low = static_cast<std::uint64_t>(m);
                }
            }
            return static_cast<std::uint64_t>(m >> 64);
        }

        std::uint64_t key() const noexcept { return key_; }
        std::uint64_t counter() const noexcept { return counter_; }

        friend bool operator==(const CounterRng &, const CounterRng &) = default;

    private:
        std::uint64_t key_ = 0;
        std::uint64_t counter_ = 0;
    };
} // namespace wslat
