// Compiled with -mavx2; only reached through the runtime dispatcher.

#include "wslat/kernels.hpp"

#include <immintrin.h>

#include <algorithm>

namespace wslat::kernels::avx2
{
    namespace
    {
        inline std::int64_t hsum(__m256i v) noexcept
        {
            const __m128i lo = _mm256_castsi256_si128(v);
            const __m128i hi = _mm256_extracti128_si256(v, 1);
            const __m128i s = _mm_add_epi64(lo, hi);
            return _mm_cvtsi128_si64(s) + _mm_extract_epi64(s, 1);
        }
    } // namespace

    std::int64_t potential(std::span<const Work> w, std::span<const Work> s) noexcept
    {
        const std::size_t n = w.size();
        __m256i acc = _mm256_setzero_si256();
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4)
        {
            const __m256i vw = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(w.data() + i));
            const __m256i vs = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(s.data() + i));
            // low 32 bits x low 32 bits -> 64-bit product; entries are < 2^32
            const __m256i ww = _mm256_mul_epu32(vw, vw);
            const __m256i ss = _mm256_mul_epu32(vs, vs);
            acc = _mm256_add_epi64(acc, ww);
            acc = _mm256_add_epi64(acc, _mm256_add_epi64(ss, ss));
        }
        std::int64_t total = hsum(acc);
        for (; i < n; ++i)
            total += w[i] * w[i] + 2 * s[i] * s[i];
        return total;
    }

    std::int64_t execute_tick(std::span<Work> w) noexcept
    {
        const std::size_t n = w.size();
        const __m256i zero = _mm256_setzero_si256();
        __m256i ran = _mm256_setzero_si256();
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4)
        {
            auto *p = reinterpret_cast<__m256i *>(w.data() + i);
            const __m256i v = _mm256_loadu_si256(p);
            const __m256i positive = _mm256_cmpgt_epi64(v, zero); // -1 where w > 0
            _mm256_storeu_si256(p, _mm256_add_epi64(v, positive));
            ran = _mm256_sub_epi64(ran, positive);
        }
        std::int64_t total = hsum(ran);
        for (; i < n; ++i)
        {
            const Work positive = w[i] > 0 ? 1 : 0;
            w[i] -= positive;
            total += positive;
        }
        return total;
    }

    Work max_value(std::span<const Work> w) noexcept
    {
        const std::size_t n = w.size();
        __m256i best = _mm256_setzero_si256();
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4)
        {
            const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(w.data() + i));
            best = _mm256_blendv_epi8(best, v, _mm256_cmpgt_epi64(v, best));
        }
        alignas(32) std::int64_t lanes[4];
        _mm256_store_si256(reinterpret_cast<__m256i *>(lanes), best);
        Work m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
        for (; i < n; ++i)
            m = std::max(m, w[i]);
        return m;
    }
} // namespace wslat::kernels::avx2
