#pragma once

// Test-only oracles. Each one recomputes a quantity along a different route
// from the library (long double, definition-level formulas, brute force) so
// the tests do not check the implementation against itself.

#include <cmath>
#include <cstdint>
#include <utility>

namespace oracle
{
    /// γ(p) straight from its definition: max over r of r / (-p log2 h(r)),
    /// with h(r) = 1 - q(r)/4 and q(r) = 1 - ((p-2)/(p-1))^r.
    inline long double gamma(std::int64_t p)
    {
        long double best = 0.0L;
        for (std::int64_t r = 1; r <= p - 1; ++r)
        {
            long double miss = 1.0L;
            for (std::int64_t i = 0; i < r; ++i)
                miss *= static_cast<long double>(p - 2) / static_cast<long double>(p - 1);
            const long double h = 1.0L - (1.0L - miss) / 4.0L;
            const long double term = static_cast<long double>(r) / (-static_cast<long double>(p) * std::log2(h));
            if (term > best)
                best = term;
        }
        return best;
    }

    /// Victim share by exhaustive search: the smallest keep with
    /// 2 keep >= w - 1 + λ (balanced loads once the transfer lands).
    inline std::pair<std::int64_t, std::int64_t> divide(std::int64_t w_before, std::int64_t lambda)
    {
        const std::int64_t remaining = w_before - 1;
        for (std::int64_t keep = 0;; ++keep)
            if (2 * keep >= remaining + lambda)
                return {keep, remaining - keep};
    }

    // Frozen from the definitions above (double precision, Python):
    inline constexpr double kGamma2 = 1.204710419826604;
    inline constexpr double kGamma3 = 2.225484174770089;
    inline constexpr double kGamma32 = 3.8635904115775217;
    inline constexpr double kGamma256 = 4.008925019070569;
    inline constexpr double kGamma512 = 4.0192962987323115;
    inline constexpr double kGammaCap = 4.029666333716933;
    // W = 1e5, p = 32, λ = 2
    inline constexpr double kBoundUniversal = 3602.014808895843;
    inline constexpr double kBoundExact = 3582.5653348290316;
} // namespace oracle
