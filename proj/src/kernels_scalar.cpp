#include "wslat/kernels.hpp"

#include <algorithm>

namespace wslat::kernels::scalar
{
    std::int64_t potential(std::span<const Work> w, std::span<const Work> s) noexcept
    {
        std::int64_t acc = 0;
        for (std::size_t i = 0; i < w.size(); ++i)
            acc += w[i] * w[i] + 2 * s[i] * s[i];
        return acc;
    }

    std::int64_t execute_tick(std::span<Work> w) noexcept
    {
        std::int64_t ran = 0;
        for (auto &x : w)
        {
            const Work positive = x > 0 ? 1 : 0;
            x -= positive;
            ran += positive;
        }
        return ran;
    }

    Work max_value(std::span<const Work> w) noexcept
    {
        Work m = 0;
        for (const auto x : w)
            m = std::max(m, x);
        return m;
    }
} // namespace wslat::kernels::scalar
