#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "survsynth/arena.hpp"
#include "survsynth/bitset.hpp"
#include "survsynth/game_structure.hpp"
#include "survsynth/objective.hpp"

namespace survsynth {

using BlockId = std::uint32_t;

// Disjoint nonempty blocks covering a domain of target locations. Blocks are
// indexed 0..size()-1 in order of their smallest cell; BlockSet bits refer to
// these indices. Each block also carries a stable id and the id of the block
// it was cut from (itself for root blocks).
class Partition {
public:
    Partition() = default;
    // Throws std::invalid_argument unless the blocks partition `domain`.
    Partition(LocSet domain, std::vector<LocSet> blocks);

    std::size_t size() const { return blocks_.size(); }
    std::size_t universe() const { return domain_.universe(); }
    const LocSet& domain() const { return domain_; }
    const LocSet& block(std::size_t i) const { return blocks_[i]; }
    const std::vector<LocSet>& blocks() const { return blocks_; }
    BlockId id(std::size_t i) const { return ids_[i]; }
    BlockId parent(std::size_t i) const { return parents_[i]; }
    // Index of the block holding `l`; size() when l is outside the domain.
    std::size_t block_of(Loc l) const { return l < block_of_.size() ? block_of_[l] : size(); }

    BlockSet alpha(const LocSet& cells) const;
    LocSet gamma(const BlockSet& blocks) const;

    // Cuts every block lying inside `scope` into its parts inside and outside
    // `by`. Returns true if anything was cut.
    bool split(const LocSet& scope, const LocSet& by);

    bool operator==(const Partition& o) const { return blocks_ == o.blocks_; }

private:
    void reindex();

    LocSet domain_;
    std::vector<LocSet> blocks_;
    std::vector<BlockId> ids_;
    std::vector<BlockId> parents_;
    std::vector<std::size_t> block_of_;
    BlockId next_id_ = 0;
};

// Every block of `fine` lies inside a block of `coarse`.
bool refines(const Partition& fine, const Partition& coarse);
// Common refinement: nonempty pairwise intersections. Parents are a's ids.
Partition meet(const Partition& a, const Partition& b);

// Names the first target predicate among `names` that is not constant on some
// block, if any.
std::optional<std::string> uniformity_violation(const Partition& q, const PredicateTable& preds,
                                               const std::set<std::string>& names);

// Coarsest partition of L_t on which every target predicate named in `names`
// is constant. Agent predicates never split.
Partition initial_partition(const SurveillanceGame& g, const PredicateTable& preds,
                            const std::set<std::string>& names);

// One line per block, comma-separated cells.
std::string dump_partition(const Partition& q);
// Parses dump_partition output; blocks must cover exactly `domain`.
Partition parse_partition(std::string_view text, const LocSet& domain);

// An abstract belief: a concrete visible target cell or a set of blocks.
// `cells` caches gamma. Ordered by agent, then cells, then concrete first.
struct AbstractState {
    Loc agent = 0;
    bool concrete = true;
    Loc target = 0;
    BlockSet blocks;
    LocSet cells;

    std::string str() const;
    bool operator==(const AbstractState& o) const {
        return agent == o.agent && concrete == o.concrete && cells == o.cells && blocks == o.blocks &&
               (!concrete || target == o.target);
    }
    std::strong_ordering operator<=>(const AbstractState& o) const;
};

struct AbstractStateHash {
    std::size_t operator()(const AbstractState& s) const { return s.cells.hash() * 31 + s.agent * 2 + s.concrete; }
};

struct AbstractChoice {
    bool concrete = true;
    Loc target = 0;
    BlockSet blocks;
    LocSet cells;
    LocSet replies;
};

AbstractState concrete_state(const Partition& q, Loc agent, Loc target);
AbstractState block_state(const Partition& q, Loc agent, BlockSet blocks);

// Choices out of `s`, ordered by cell content: one per visible successor, and
// alpha of all hidden successors of gamma(s) when there are any.
std::vector<AbstractChoice> abstract_successors(const SurveillanceGame& g, const Partition& q,
                                                const AbstractState& s);

struct AbstractGame {
    Partition partition;
    std::vector<AbstractState> states;  // canonical order; arena node i is states[i]
    std::vector<AbstractChoice> choices;  // replies cleared; indexed by arena choice id
    Arena arena;

    NodeId initial() const { return arena.initial(); }
    std::optional<NodeId> find(const AbstractState& s) const;
};

inline constexpr std::size_t kDefaultAbstractStates = 1'000'000;

// Throws BudgetExceeded past max_states reachable states.
AbstractGame build_abstract_game(const SurveillanceGame& g, const Partition& q,
                                 std::size_t max_states = kDefaultAbstractStates);

}  // namespace survsynth
