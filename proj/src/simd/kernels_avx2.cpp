// Compiled with -mavx2. Only reached through the dispatch table after a CPU
// feature check, so nothing here may run on a machine without AVX2.
#include "survsynth/simd/kernels.hpp"

#include <bit>

#include <immintrin.h>

namespace survsynth::simd::avx2 {
namespace {

constexpr std::size_t kLanes = 4;  // 64-bit words per __m256i

inline __m256i load(const Word* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
inline void store(Word* p, __m256i v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v); }

// Per-64-bit-lane popcount: nibble lookup table, then horizontal byte sums.
inline __m256i popcount_lanes(__m256i v) {
    const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,  //
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    __m256i lo = _mm256_and_si256(v, low_mask);
    __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    __m256i counts = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
    return _mm256_sad_epu8(counts, _mm256_setzero_si256());
}

inline std::size_t hsum_lanes(__m256i acc) {
    alignas(32) Word lanes[kLanes];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    return static_cast<std::size_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]);
}

void or_into(Word* dst, const Word* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) store(dst + i, _mm256_or_si256(load(dst + i), load(src + i)));
    for (; i < n; ++i) dst[i] |= src[i];
}

void and_into(Word* dst, const Word* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) store(dst + i, _mm256_and_si256(load(dst + i), load(src + i)));
    for (; i < n; ++i) dst[i] &= src[i];
}

void andnot_into(Word* dst, const Word* src, std::size_t n) {
    std::size_t i = 0;
    // _mm256_andnot_si256(a, b) computes ~a & b
    for (; i + kLanes <= n; i += kLanes) store(dst + i, _mm256_andnot_si256(load(src + i), load(dst + i)));
    for (; i < n; ++i) dst[i] &= ~src[i];
}

std::size_t popcount(const Word* a, std::size_t n) {
    std::size_t i = 0;
    __m256i acc = _mm256_setzero_si256();
    for (; i + kLanes <= n; i += kLanes) acc = _mm256_add_epi64(acc, popcount_lanes(load(a + i)));
    std::size_t total = hsum_lanes(acc);
    for (; i < n; ++i) total += static_cast<std::size_t>(std::popcount(a[i]));
    return total;
}

std::size_t popcount_andnot(const Word* a, const Word* b, std::size_t n) {
    std::size_t i = 0;
    __m256i acc = _mm256_setzero_si256();
    for (; i + kLanes <= n; i += kLanes)
        acc = _mm256_add_epi64(acc, popcount_lanes(_mm256_andnot_si256(load(b + i), load(a + i))));
    std::size_t total = hsum_lanes(acc);
    for (; i < n; ++i) total += static_cast<std::size_t>(std::popcount(a[i] & ~b[i]));
    return total;
}

bool is_subset(const Word* a, const Word* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        // testc(b, a) is set iff (~b & a) == 0
        if (!_mm256_testc_si256(load(b + i), load(a + i))) return false;
    }
    for (; i < n; ++i)
        if (a[i] & ~b[i]) return false;
    return true;
}

bool intersects(const Word* a, const Word* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        if (!_mm256_testz_si256(load(a + i), load(b + i))) return true;
    for (; i < n; ++i)
        if (a[i] & b[i]) return true;
    return false;
}

bool any(const Word* a, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256i v = load(a + i);
        if (!_mm256_testz_si256(v, v)) return true;
    }
    for (; i < n; ++i)
        if (a[i]) return true;
    return false;
}

}  // namespace

const BitKernels& table() {
    static const BitKernels t{Isa::avx2,      or_into,   and_into,   andnot_into, popcount,
                              popcount_andnot, is_subset, intersects, any};
    return t;
}

}  // namespace survsynth::simd::avx2
