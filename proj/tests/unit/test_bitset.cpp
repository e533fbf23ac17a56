#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "survsynth/bitset.hpp"
#include "survsynth/simd/kernels.hpp"

using namespace survsynth;

namespace {

std::set<Loc> random_set(std::mt19937_64& rng, std::size_t universe, double density) {
    std::bernoulli_distribution pick(density);
    std::set<Loc> s;
    for (Loc i = 0; i < universe; ++i)
        if (pick(rng)) s.insert(i);
    return s;
}

std::set<Loc> as_set(const BitSet& b) {
    auto v = b.to_vector();
    return {v.begin(), v.end()};
}

std::vector<simd::Word> random_words(std::mt19937_64& rng, std::size_t n) {
    std::vector<simd::Word> w(n);
    for (auto& x : w) {
        // Mix dense, sparse and empty words.
        switch (rng() % 4) {
            case 0: x = 0; break;
            case 1: x = rng() & rng() & rng(); break;
            default: x = rng();
        }
    }
    return w;
}

}  // namespace

TEST_SUITE("bitset") {
    TEST_CASE("set algebra agrees with std::set") {
        std::mt19937_64 rng(7);
        for (std::size_t universe : {1u, 25u, 63u, 64u, 65u, 150u, 200u, 257u, 700u}) {
            for (int round = 0; round < 40; ++round) {
                auto sa = random_set(rng, universe, 0.3), sb = random_set(rng, universe, 0.5);
                BitSet a = BitSet::from_range(universe, sa), b = BitSet::from_range(universe, sb);
                CHECK(as_set(a) == sa);
                CHECK(a.size() == sa.size());
                CHECK(a.empty() == sa.empty());

                std::set<Loc> uni, inter, diff;
                std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(uni, uni.end()));
                std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(inter, inter.end()));
                std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(diff, diff.end()));
                CHECK(as_set(a | b) == uni);
                CHECK(as_set(a & b) == inter);
                CHECK(as_set(a - b) == diff);
                CHECK(a.count_outside(b) == diff.size());
                CHECK(a.intersects(b) == !inter.empty());
                CHECK(a.is_subset_of(b) == diff.empty());
                CHECK((a & b).is_subset_of(a));
                CHECK(a.first() == (sa.empty() ? universe : *sa.begin()));

                // Ordering is lexicographic over sorted elements.
                std::vector<Loc> va(sa.begin(), sa.end()), vb(sb.begin(), sb.end());
                CHECK(((a <=> b) < 0) == (va < vb));
                CHECK((a == b) == (va == vb));
            }
        }
    }

    TEST_CASE("ordering on prefixes and single elements") {
        CHECK(BitSet(10, {1, 2}) < BitSet(10, {1, 2, 3}));
        CHECK(BitSet(10, {1, 3}) > BitSet(10, {1, 2, 3}));
        CHECK(BitSet(10, {}) < BitSet(10, {0}));
        CHECK(BitSet(100, {70}) > BitSet(100, {3, 90}));
        CHECK(BitSet(100, {3, 70}) < BitSet(100, {3, 90}));
    }

    TEST_CASE("erase and clear keep the universe") {
        BitSet a(130, {0, 64, 129});
        a.erase(64);
        CHECK(a.to_vector() == std::vector<Loc>{0, 129});
        CHECK_FALSE(a.contains(500));
        a.clear();
        CHECK(a.empty());
        CHECK(a.universe() == 130);
    }

    TEST_CASE("scalar and AVX2 kernels agree") {
        if (!simd::isa_available(simd::Isa::avx2)) {
            MESSAGE("AVX2 not available; only the scalar table is exercised");
            return;
        }
        const auto& s = simd::kernels_for(simd::Isa::scalar);
        const auto& v = simd::kernels_for(simd::Isa::avx2);
        CHECK(s.isa == simd::Isa::scalar);
        CHECK(v.isa == simd::Isa::avx2);
        std::mt19937_64 rng(11);
        for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 17u, 33u}) {
            for (int round = 0; round < 50; ++round) {
                auto a = random_words(rng, n), b = random_words(rng, n);
                if (round % 5 == 0) b = a;  // subset / equal edge cases
                if (round % 7 == 0)
                    for (auto& x : b) x = ~x;
                CHECK(s.popcount(a.data(), n) == v.popcount(a.data(), n));
                CHECK(s.popcount_andnot(a.data(), b.data(), n) == v.popcount_andnot(a.data(), b.data(), n));
                CHECK(s.is_subset(a.data(), b.data(), n) == v.is_subset(a.data(), b.data(), n));
                CHECK(s.intersects(a.data(), b.data(), n) == v.intersects(a.data(), b.data(), n));
                CHECK(s.any(a.data(), n) == v.any(a.data(), n));
                auto d1 = a, d2 = a;
                s.or_into(d1.data(), b.data(), n);
                v.or_into(d2.data(), b.data(), n);
                CHECK(d1 == d2);
                d1 = a, d2 = a;
                s.and_into(d1.data(), b.data(), n);
                v.and_into(d2.data(), b.data(), n);
                CHECK(d1 == d2);
                d1 = a, d2 = a;
                s.andnot_into(d1.data(), b.data(), n);
                v.andnot_into(d2.data(), b.data(), n);
                CHECK(d1 == d2);
            }
        }
    }

    TEST_CASE("switching the active table leaves results unchanged") {
        std::mt19937_64 rng(3);
        const simd::Isa before = simd::active_isa();
        auto sa = random_set(rng, 300, 0.4), sb = random_set(rng, 300, 0.4);
        BitSet a = BitSet::from_range(300, sa), b = BitSet::from_range(300, sb);
        simd::set_active_isa(simd::Isa::scalar);
        const auto r1 = std::tuple((a | b).to_vector(), (a & b).size(), a.is_subset_of(b), a.count_outside(b));
        if (simd::isa_available(simd::Isa::avx2)) {
            simd::set_active_isa(simd::Isa::avx2);
            const auto r2 = std::tuple((a | b).to_vector(), (a & b).size(), a.is_subset_of(b), a.count_outside(b));
            CHECK(r1 == r2);
        } else {
            CHECK_THROWS_AS(simd::set_active_isa(simd::Isa::avx2), std::invalid_argument);
        }
        simd::set_active_isa(before);
        CHECK(simd::isa_name(simd::Isa::scalar) == "scalar");
    }
}
