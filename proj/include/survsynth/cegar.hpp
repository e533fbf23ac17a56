#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "survsynth/abstraction.hpp"
#include "survsynth/game_structure.hpp"
#include "survsynth/objective.hpp"
#include "survsynth/solver.hpp"

namespace survsynth {

// One node of an annotated abstract path: the abstract label and the exact
// belief reached by following the same moves in the belief game.
struct PathStep {
    AbstractState label;
    LocSet belief;
};
using AnnotatedPath = std::vector<PathStep>;

// Exact belief at a child labelled `child` of a node with agent `agent` and
// belief `belief`. Block-set children keep only cells hidden from `agent`.
LocSet propagate_belief(const SurveillanceGame& g, Loc agent, const LocSet& belief, const AbstractState& child);

// Safety atoms hold on the belief, or the belief is empty (the branch cannot
// happen concretely).
bool satisfies_safety(const SurveillanceGame& g, const PredicateTable& preds, const Objective& o, Loc agent,
                      const LocSet& belief);
bool satisfies_atom(const SurveillanceGame& g, const PredicateTable& preds, const Atom& a, Loc agent,
                    const LocSet& belief);

struct TreeAnnotation {
    std::vector<LocSet> belief;              // per tree node
    std::vector<std::uint32_t> good_leaves;  // leaves whose belief satisfies the safety atoms, path order
};

TreeAnnotation annotate_cex_tree(const SurveillanceGame& g, const AbstractGame& game, const CexTree& tree,
                                 const PredicateTable& preds, const Objective& o);
AnnotatedPath tree_path(const AbstractGame& game, const CexTree& tree, const TreeAnnotation& ann, std::uint32_t leaf);

// First root-to-leaf path ending in a good leaf; nullopt means the tree is
// concretizable.
std::optional<AnnotatedPath> annotate_tree(const SurveillanceGame& g, const AbstractGame& game, const CexTree& tree,
                                           const PredicateTable& preds, const Objective& o);

// Splits the last node's blocks by its belief, then walks back splitting each
// node's blocks into the cells whose relevant successors stay inside the
// previously kept cells. Stops at a concrete label that is already exact.
Partition refine_safety(const SurveillanceGame& g, const Partition& q, const AnnotatedPath& path);

// Product of a counterexample graph with exact beliefs. Nodes are created in
// BFS order from d0; parent gives a shortest path back to d0.
struct AnalysisGraph {
    struct Node {
        LocSet belief;
        std::uint32_t cex;  // counterexample graph node
    };
    std::vector<Node> nodes;
    std::vector<std::vector<std::uint32_t>> succ;
    std::vector<std::uint32_t> parent;
};

AnalysisGraph build_analysis_graph(const SurveillanceGame& g, const AbstractGame& game, const CexGraph& cex,
                                   std::size_t max_nodes = kDefaultAbstractStates);

// stem runs d0..g and cycle runs g..g (first and last entries equal g).
struct Lasso {
    std::vector<std::uint32_t> stem;
    std::vector<std::uint32_t> cycle;
};

// Analysis-graph nodes lying on some cycle.
std::vector<bool> on_cycle(const AnalysisGraph& d);
// Shortest lasso through `g`, which must lie on a cycle.
Lasso lasso_through(const AnalysisGraph& d, std::uint32_t g);

// Lasso through the first cycle node (in D order) whose belief satisfies p_k.
// nullopt means D is a concrete counterexample.
std::optional<Lasso> find_good_lasso(const SurveillanceGame& g, const AbstractGame& game, const CexGraph& cex,
                                     const AnalysisGraph& d, int k);

AnnotatedPath analysis_path(const AbstractGame& game, const CexGraph& cex, const AnalysisGraph& d,
                            const std::vector<std::uint32_t>& nodes);

// Common refinement of refine_safety on stem+cycle and on the stem alone.
Partition refine_liveness(const SurveillanceGame& g, const Partition& q, const AbstractGame& game,
                          const CexGraph& cex, const AnalysisGraph& d, const Lasso& lasso);

struct Refinement {
    enum class Kind { tree_path, sink_path, lasso, strict_subset };
    Kind kind;
    Partition partition;
};

std::string kind_name(Refinement::Kind k);

// Safety sinks first, then lassos through nodes that satisfy their mode's
// recurrence atom, in D order; the first witness that adds blocks wins. When
// witnesses exist but none adds blocks, falls back to nodes whose belief is a
// strict subset of their cells. nullopt means concretizable.
std::optional<Refinement> analyze_general(const SurveillanceGame& g, const PredicateTable& preds,
                                          const Objective& o, const AbstractGame& game, const TargetStrategy& t,
                                          const CexGraph& cex, const AnalysisGraph& d);

// Re-derives the abstract labels of `path`'s moves under `q`. True when the
// moves are no longer available, or when a node at index >= check_from now
// carries a label whose cells pass `good`.
template <class Good>
bool path_eliminated(const SurveillanceGame& g, const Partition& q, const AnnotatedPath& path,
                     std::size_t check_from, Good&& good);

struct CegarOptions {
    std::size_t max_states = kDefaultAbstractStates;
    std::size_t max_iters = 200;
    std::size_t max_tree_nodes = 200'000;
};

struct CegarOutcome {
    enum class Verdict { realizable, unrealizable, budget_exceeded };
    Verdict verdict = Verdict::budget_exceeded;
    std::size_t iterations = 0;
    Partition partition;
    std::optional<AbstractGame> game;  // the last abstract game built
    std::optional<AgentStrategy> strategy;
    std::string counterexample;  // text dump of the concrete counterexample
    std::string budget_message;
    std::vector<std::string> transcript;
};

CegarOutcome cegar_loop(const SurveillanceGame& g, const PredicateTable& preds, const Objective& o,
                        const Partition& initial, const CegarOptions& options = {});

// Node valuation for an abstract game under `o`.
WinningCondition abstract_condition(const SurveillanceGame& g, const PredicateTable& preds, const Objective& o,
                                    const AbstractGame& game);

// ---- implementation of the template ----

template <class Good>
bool path_eliminated(const SurveillanceGame& g, const Partition& q, const AnnotatedPath& path,
                     std::size_t check_from, Good&& good) {
    if (path.empty()) return true;
    AbstractState cur = path[0].label;
    for (std::size_t j = 0;; ++j) {
        if (j >= check_from && good(cur)) return true;
        if (j + 1 == path.size()) return false;
        const AbstractState& want = path[j + 1].label;
        bool found = false;
        for (AbstractChoice& c : abstract_successors(g, q, cur)) {
            if (c.concrete != want.concrete || (c.concrete && c.target != want.target)) continue;
            if (!c.replies.contains(want.agent)) break;
            cur = AbstractState{want.agent, c.concrete, c.target, std::move(c.blocks), std::move(c.cells)};
            found = true;
            break;
        }
        if (!found) return true;
    }
}

}  // namespace survsynth
