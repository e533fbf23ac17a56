#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

#include "survsynth/arena.hpp"
#include "survsynth/bitset.hpp"
#include "survsynth/game_structure.hpp"
#include "survsynth/objective.hpp"

namespace survsynth {

// Canonical order: agent location, then the belief's sorted element sequence.
struct BeliefState {
    Loc agent = 0;
    LocSet belief;
    auto operator<=>(const BeliefState&) const = default;
};

struct BeliefStateHash {
    std::size_t operator()(const BeliefState& s) const { return s.belief.hash() * 31 + s.agent; }
};

// One target choice: a visible singleton or the set of all hidden successors.
struct BeliefChoice {
    LocSet belief;
    bool visible = false;
    LocSet replies;  // agent locations allowed after this choice
};

// Target choices out of (agent, cells), sorted by belief content. Replies are
// the union of succ_a over every (l_t, l_t') pair that produces the choice.
std::vector<BeliefChoice> belief_successors(const SurveillanceGame& g, Loc agent, const LocSet& cells);
inline std::vector<BeliefChoice> belief_successors(const SurveillanceGame& g, const BeliefState& s) {
    return belief_successors(g, s.agent, s.belief);
}

// |{l in cells | not vis(agent, l)}| <= k
bool eval_surveillance_pred(const SurveillanceGame& g, Loc agent, const LocSet& cells, int k);
// Agent predicates test the agent cell; target predicates must hold on every cell.
bool eval_task_pred(const PredicateTable& preds, const std::string& name, Loc agent, const LocSet& cells);
bool eval_atom(const SurveillanceGame& g, const PredicateTable& preds, const Atom& atom, Loc agent,
               const LocSet& cells);

// A target predicate must not distinguish two cells hidden from the same agent
// location. Throws Error naming a witness otherwise.
void check_observable(const SurveillanceGame& g, const TaskPredicate& p);
// Resolves every task atom of `o` and checks observability.
void check_objective(const SurveillanceGame& g, const PredicateTable& preds, const Objective& o);

// Explicit reachable belief-set game; the exact semantics used as an oracle.
struct BeliefGame {
    std::vector<BeliefState> states;  // canonical order; arena node i is states[i]
    std::vector<LocSet> choice_beliefs;
    Arena arena;

    NodeId initial() const { return arena.initial(); }
    std::optional<NodeId> find(const BeliefState& s) const;
};

inline constexpr std::size_t kDefaultOracleStates = 2'000'000;

// Throws BudgetExceeded once more than max_states states are discovered.
BeliefGame build_belief_game(const SurveillanceGame& g, std::size_t max_states = kDefaultOracleStates);

}  // namespace survsynth
