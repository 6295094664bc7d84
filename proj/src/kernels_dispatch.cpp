#include "wslat/kernels.hpp"

#include <atomic>

namespace wslat::kernels
{
    namespace
    {
        std::atomic<Isa> &selected()
        {
            static std::atomic<Isa> isa{detect_isa()};
            return isa;
        }

        constexpr Work kSimdEntryLimit = Work{1} << 32;
    } // namespace

    std::string_view to_string(Isa isa) noexcept
    {
        switch (isa)
        {
        case Isa::avx2:
            return "avx2";
        case Isa::scalar:
            break;
        }
        return "scalar";
    }

    Isa detect_isa() noexcept
    {
#ifdef WSLAT_HAVE_AVX2_KERNELS
        __builtin_cpu_init();
        if (__builtin_cpu_supports("avx2"))
            return Isa::avx2;
#endif
        return Isa::scalar;
    }

    Isa active_isa() noexcept { return selected().load(std::memory_order_relaxed); }

    void force_isa(Isa isa) noexcept
    {
        if (isa == Isa::avx2 && detect_isa() != Isa::avx2)
            isa = Isa::scalar;
        selected().store(isa, std::memory_order_relaxed);
    }

    std::int64_t potential(std::span<const Work> w, std::span<const Work> s, Work bound) noexcept
    {
#ifdef WSLAT_HAVE_AVX2_KERNELS
        if (active_isa() == Isa::avx2 && bound < kSimdEntryLimit)
            return avx2::potential(w, s);
#endif
        (void)bound;
        return scalar::potential(w, s);
    }

    std::int64_t execute_tick(std::span<Work> w) noexcept
    {
#ifdef WSLAT_HAVE_AVX2_KERNELS
        if (active_isa() == Isa::avx2)
            return avx2::execute_tick(w);
#endif
        return scalar::execute_tick(w);
    }

    Work max_value(std::span<const Work> w) noexcept
    {
#ifdef WSLAT_HAVE_AVX2_KERNELS
        if (active_isa() == Isa::avx2)
            return avx2::max_value(w);
#endif
        return scalar::max_value(w);
    }
} // namespace wslat::kernels
