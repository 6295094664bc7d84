#pragma once

// Data-parallel inner loops of the tick-stepped engine. Each kernel has a
// portable scalar reference and an AVX2 variant; the dispatcher picks one at
// runtime from CPUID. All variants are exact integer arithmetic and must
// agree bit-for-bit.

#include "wslat/types.hpp"

#include <cstdint>
#include <span>
#include <string_view>

namespace wslat::kernels
{
    enum class Isa
    {
        scalar,
        avx2
    };

    std::string_view to_string(Isa isa) noexcept;

    /// Best ISA supported by this CPU and compiled into this binary.
    Isa detect_isa() noexcept;

    /// Currently selected ISA (detected once, overridable for tests).
    Isa active_isa() noexcept;
    void force_isa(Isa isa) noexcept;

    namespace scalar
    {
        std::int64_t potential(std::span<const Work> w, std::span<const Work> s) noexcept;
        std::int64_t execute_tick(std::span<Work> w) noexcept;
        Work max_value(std::span<const Work> w) noexcept;
    } // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define WSLAT_HAVE_AVX2_KERNELS 1
    namespace avx2
    {
        // Inputs must lie in [0, 2^32); the dispatcher checks this.
        std::int64_t potential(std::span<const Work> w, std::span<const Work> s) noexcept;
        std::int64_t execute_tick(std::span<Work> w) noexcept;
        Work max_value(std::span<const Work> w) noexcept;
    } // namespace avx2
#endif

    /// sum_i w_i^2 + 2 s_i^2. `bound` is an upper bound on every entry
    /// (the run's total work); the SIMD path needs entries below 2^32.
    std::int64_t potential(std::span<const Work> w, std::span<const Work> s, Work bound) noexcept;

    /// Every positive entry loses one unit; returns how many units ran.
    std::int64_t execute_tick(std::span<Work> w) noexcept;

    Work max_value(std::span<const Work> w) noexcept;
} // namespace wslat::kernels
