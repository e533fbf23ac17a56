#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "survsynth/arena.hpp"
#include "survsynth/bitset.hpp"
#include "survsynth/objective.hpp"

namespace survsynth {

inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// Atom valuations lifted to node sets.
struct WinningCondition {
    BitSet safe;                     // nodes satisfying every safety atom
    std::vector<BitSet> recurrence;  // one node set per recurrence atom
};

template <class Holds>
WinningCondition make_condition(const Objective& o, std::size_t nodes, Holds&& holds) {
    WinningCondition w{BitSet(nodes), {}};
    for (std::size_t i = 0; i < o.recurrence.size(); ++i) w.recurrence.emplace_back(nodes);
    for (NodeId n = 0; n < nodes; ++n) {
        bool safe = true;
        for (const Atom& a : o.safety) safe = safe && holds(a, n);
        if (safe) w.safe.insert(n);
        for (std::size_t i = 0; i < o.recurrence.size(); ++i)
            if (holds(o.recurrence[i], n)) w.recurrence[i].insert(n);
    }
    return w;
}

// {s | every choice at s has some reply in W}
BitSet cpre(const Arena& arena, const BitSet& w);

struct Attractor {
    BitSet region;
    std::vector<std::uint32_t> rank;  // kNone outside the region
    std::vector<ChoiceId> choice;     // target attractors only: the forcing choice
};

// Least X within `within` with X = goal ∪ cpre(X). Linear in the arena size.
Attractor agent_attractor(const Arena& arena, const BitSet& within, const BitSet& goal);
// Least X within `within` with X = goal ∪ {s | some choice has every reply in X}.
Attractor target_attractor(const Arena& arena, const BitSet& within, const BitSet& goal);

// Finite-memory agent controller. Memory cycles through the recurrence atoms.
struct AgentStrategy {
    std::size_t memory_count = 1;
    std::vector<std::vector<NodeId>> reply;              // [memory][choice], kNone if undefined
    std::vector<std::vector<std::uint32_t>> next_memory;  // [memory][choice]
};

// Positional target strategy on the target's winning region.
struct TargetStrategy {
    static constexpr std::int32_t kSafetyMode = -1;
    std::vector<ChoiceId> choice;  // per node; kNone on safety violations and agent-won nodes
    BitSet bad;                    // nodes violating a safety atom
    // Rank in the attractor to `bad` (kNone outside it).
    std::vector<std::uint32_t> safety_rank;
    // For nodes won through a recurrence atom: the atom index the target keeps
    // false forever, and the outer fixpoint round the node dropped out in.
    std::vector<std::int32_t> mode;
    std::vector<std::uint32_t> layer;
};

struct SolveResult {
    bool agent_wins = false;
    BitSet winning;  // agent's winning region
    std::optional<AgentStrategy> agent;
    std::optional<TargetStrategy> target;
};

SolveResult solve(const Arena& arena, const WinningCondition& cond);

// Target strategy unfolded from the initial node under every agent reply.
// Leaves are exactly the nodes violating a safety atom.
struct CexTree {
    struct Node {
        NodeId state;
        std::uint32_t parent = kNone;
        ChoiceId choice = kNone;  // target choice taken here; kNone at leaves
        std::vector<std::uint32_t> children;
    };
    std::vector<Node> nodes;  // nodes[0] is the root; children follow reply order
};

// Throws BudgetExceeded beyond max_nodes tree nodes.
CexTree extract_cex_tree(const Arena& arena, const TargetStrategy& t, std::size_t max_nodes);

// Closure of the target strategy from the initial node. Safety violations are
// sinks. Each graph node is one arena node.
struct CexGraph {
    std::vector<NodeId> states;  // graph node -> arena node, in discovery (BFS) order
    std::vector<ChoiceId> choice;
    std::vector<std::vector<std::uint32_t>> succ;  // graph node -> graph nodes, reply order
    std::vector<bool> sink;
};

CexGraph extract_cex_graph(const Arena& arena, const TargetStrategy& t);

}  // namespace survsynth
