#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "survsynth/simd/kernels.hpp"

namespace survsynth {

// Grid cells are identified by their row-major index.
using Loc = std::uint32_t;

// Fixed-universe set of small integers, packed 64 per word.
// Used for sets of cells (beliefs, visibility rows, successor sets), sets of
// partition blocks and sets of arena nodes. Bits at or above universe() are
// always zero. Universes up to 256 are stored inline.
class BitSet {
public:
    using Word = simd::Word;

    BitSet() = default;
    explicit BitSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}
    BitSet(std::size_t universe, std::initializer_list<Loc> items) : BitSet(universe) {
        for (Loc i : items) insert(i);
    }
    template <class Range>
    static BitSet from_range(std::size_t universe, const Range& items) {
        BitSet s(universe);
        for (auto i : items) s.insert(static_cast<Loc>(i));
        return s;
    }

    std::size_t universe() const { return universe_; }
    std::span<const Word> words() const { return {words_.data(), words_.size()}; }

    bool contains(Loc i) const { return i < universe_ && ((words_[i >> 6] >> (i & 63)) & 1u); }
    void insert(Loc i) { words_[i >> 6] |= Word{1} << (i & 63); }
    void erase(Loc i) { words_[i >> 6] &= ~(Word{1} << (i & 63)); }
    void clear() { std::fill(words_.begin(), words_.end(), Word{0}); }

    bool empty() const { return !simd::kernels().any(words_.data(), words_.size()); }
    std::size_t size() const { return simd::kernels().popcount(words_.data(), words_.size()); }

    // |this \ mask|
    std::size_t count_outside(const BitSet& mask) const {
        return simd::kernels().popcount_andnot(words_.data(), mask.words_.data(), words_.size());
    }
    bool is_subset_of(const BitSet& other) const {
        return simd::kernels().is_subset(words_.data(), other.words_.data(), words_.size());
    }
    bool intersects(const BitSet& other) const {
        return simd::kernels().intersects(words_.data(), other.words_.data(), words_.size());
    }

    BitSet& operator|=(const BitSet& o) {
        simd::kernels().or_into(words_.data(), o.words_.data(), words_.size());
        return *this;
    }
    BitSet& operator&=(const BitSet& o) {
        simd::kernels().and_into(words_.data(), o.words_.data(), words_.size());
        return *this;
    }
    BitSet& operator-=(const BitSet& o) {
        simd::kernels().andnot_into(words_.data(), o.words_.data(), words_.size());
        return *this;
    }
    friend BitSet operator|(BitSet a, const BitSet& b) { return a |= b; }
    friend BitSet operator&(BitSet a, const BitSet& b) { return a &= b; }
    friend BitSet operator-(BitSet a, const BitSet& b) { return a -= b; }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            Word bits = words_[w];
            while (bits) {
                auto bit = static_cast<unsigned>(std::countr_zero(bits));
                f(static_cast<Loc>(w * 64 + bit));
                bits &= bits - 1;
            }
        }
    }

    // Smallest element; universe() when empty.
    Loc first() const {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if (words_[w]) return static_cast<Loc>(w * 64 + std::countr_zero(words_[w]));
        return static_cast<Loc>(universe_);
    }

    std::vector<Loc> to_vector() const {
        std::vector<Loc> out;
        out.reserve(size());
        for_each([&](Loc i) { out.push_back(i); });
        return out;
    }

    bool operator==(const BitSet& o) const { return universe_ == o.universe_ && words_ == o.words_; }

    // Lexicographic order of the sorted element sequences.
    std::strong_ordering operator<=>(const BitSet& o) const {
        if (universe_ != o.universe_) return universe_ <=> o.universe_;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            Word diff = words_[w] ^ o.words_[w];
            if (!diff) continue;
            Word lowest = diff & (~diff + 1);
            // The set holding the lowest differing element is smaller, unless
            // the set lacking it has nothing beyond it (a proper prefix).
            bool mine = words_[w] & lowest;
            const BitSet& lacking = mine ? o : *this;
            Word above = ~((lowest << 1) - 1);
            bool lacking_has_more = (lacking.words_[w] & above) != 0;
            for (std::size_t v = w + 1; !lacking_has_more && v < words_.size(); ++v)
                lacking_has_more = lacking.words_[v] != 0;
            bool this_smaller = mine ? lacking_has_more : !lacking_has_more;
            return this_smaller ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        return std::strong_ordering::equal;
    }

    std::size_t hash() const {
        std::uint64_t h = 1469598103934665603ull ^ universe_;
        for (Word w : words_) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }

private:
    std::size_t universe_ = 0;
    boost::container::small_vector<Word, 4> words_;
};

using LocSet = BitSet;
using BlockSet = BitSet;

struct BitSetHash {
    std::size_t operator()(const BitSet& s) const { return s.hash(); }
};

}  // namespace survsynth
