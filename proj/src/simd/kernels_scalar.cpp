#include "survsynth/simd/kernels.hpp"

#include <bit>

namespace survsynth::simd::scalar {
namespace {

void or_into(Word* dst, const Word* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] |= src[i];
}

void and_into(Word* dst, const Word* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] &= src[i];
}

void andnot_into(Word* dst, const Word* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] &= ~src[i];
}

std::size_t popcount(const Word* a, std::size_t n) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) total += static_cast<std::size_t>(std::popcount(a[i]));
    return total;
}

std::size_t popcount_andnot(const Word* a, const Word* b, std::size_t n) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) total += static_cast<std::size_t>(std::popcount(a[i] & ~b[i]));
    return total;
}

bool is_subset(const Word* a, const Word* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] & ~b[i]) return false;
    return true;
}

bool intersects(const Word* a, const Word* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] & b[i]) return true;
    return false;
}

bool any(const Word* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (a[i]) return true;
    return false;
}

}  // namespace

const BitKernels& table() {
    static const BitKernels t{Isa::scalar, or_into,    and_into,   andnot_into, popcount,
                              popcount_andnot, is_subset, intersects, any};
    return t;
}

}  // namespace survsynth::simd::scalar
