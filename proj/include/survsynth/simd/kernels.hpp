#pragma once
// Word-parallel kernels over packed bitsets.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2
// variant. The active table is chosen once at first use: AVX2 when the CPU
// reports it, scalar otherwise. SURVSYNTH_ISA=scalar|avx2 in the environment
// overrides the choice, and set_active_isa() does the same from code.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace survsynth::simd {

using Word = std::uint64_t;

enum class Isa { scalar, avx2 };

struct BitKernels {
    Isa isa;
    // dst |= src, dst &= src, dst &= ~src over n words
    void (*or_into)(Word* dst, const Word* src, std::size_t n);
    void (*and_into)(Word* dst, const Word* src, std::size_t n);
    void (*andnot_into)(Word* dst, const Word* src, std::size_t n);
    std::size_t (*popcount)(const Word* a, std::size_t n);
    // popcount(a & ~b)
    std::size_t (*popcount_andnot)(const Word* a, const Word* b, std::size_t n);
    // (a & ~b) == 0
    bool (*is_subset)(const Word* a, const Word* b, std::size_t n);
    // (a & b) != 0
    bool (*intersects)(const Word* a, const Word* b, std::size_t n);
    bool (*any)(const Word* a, std::size_t n);
};

namespace scalar {
const BitKernels& table();
}

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
const BitKernels& table();
}
#endif

bool isa_available(Isa isa);
const BitKernels& kernels_for(Isa isa);

// The table in use by the library.
const BitKernels& kernels();
Isa active_isa();
// Throws std::invalid_argument when the ISA is not available on this CPU.
void set_active_isa(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace survsynth::simd
