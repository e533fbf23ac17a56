#include "survsynth/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace survsynth::simd {
namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(SURVSYNTH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa default_isa() {
    if (const char* forced = std::getenv("SURVSYNTH_ISA")) {
        std::string v(forced);
        if (v == "scalar") return Isa::scalar;
        if (v == "avx2" && cpu_has_avx2()) return Isa::avx2;
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<const BitKernels*>& active_slot() {
    static std::atomic<const BitKernels*> slot{&kernels_for(default_isa())};
    return slot;
}

}  // namespace

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2: return cpu_has_avx2();
    }
    return false;
}

const BitKernels& kernels_for(Isa isa) {
    if (!isa_available(isa)) throw std::invalid_argument("ISA not available: " + std::string(isa_name(isa)));
#if (defined(__x86_64__) || defined(_M_X64)) && defined(SURVSYNTH_HAVE_AVX2)
    if (isa == Isa::avx2) return avx2::table();
#endif
    return scalar::table();
}

const BitKernels& kernels() { return *active_slot().load(std::memory_order_relaxed); }

Isa active_isa() { return kernels().isa; }

void set_active_isa(Isa isa) { active_slot().store(&kernels_for(isa), std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

}  // namespace survsynth::simd
