#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "survsynth/bitset.hpp"

namespace survsynth {

// A (agent, target) location pair. The target moves first, then the agent.
struct GameState {
    Loc agent;
    Loc target;
    auto operator<=>(const GameState&) const = default;
};

// One target move out of a state, with the agent replies T allows after it.
struct TargetMove {
    Loc target;
    LocSet agent_replies;
};

// Surveillance game structure (S, s_init, T, vis) over a universe of location
// ids. T is held as two successor maps: target moves per state, and agent
// replies per (state, target move). States with agent == target never occur.
class SurveillanceGame {
public:
    SurveillanceGame(std::size_t universe, LocSet agent_locations, LocSet target_locations, GameState initial);

    void set_visibility(Loc agent, LocSet visible_targets);
    void set_visible(Loc agent, Loc target, bool visible);
    // Adds ((agent, target), (agent_next, target_next)) to T.
    void add_transition(GameState from, GameState to);

    std::size_t universe() const { return universe_; }
    const LocSet& agent_locations() const { return agent_locations_; }
    const LocSet& target_locations() const { return target_locations_; }
    GameState initial() const { return initial_; }

    bool visible(Loc agent, Loc target) const { return visible_[agent].contains(target); }
    const LocSet& visible_from(Loc agent) const { return visible_[agent]; }
    // Target locations hidden from `agent`.
    const LocSet& invisible_from(Loc agent) const { return invisible_[agent]; }

    std::span<const TargetMove> moves(GameState s) const { return entry(s).moves; }
    const LocSet& succ_t(GameState s) const { return entry(s).targets; }
    // Union of succ_t(agent, t) over t in B; t == agent is skipped.
    LocSet succ_t(Loc agent, const LocSet& beliefs) const;
    // Empty when target_next is not a target move from (agent, target).
    LocSet succ_a(Loc agent, Loc target, Loc target_next) const;

private:
    struct Entry {
        LocSet targets;
        std::vector<TargetMove> moves;
    };
    const Entry& entry(GameState s) const { return table_[s.agent * universe_ + s.target]; }
    Entry& entry(GameState s) { return table_[s.agent * universe_ + s.target]; }

    std::size_t universe_;
    LocSet agent_locations_;
    LocSet target_locations_;
    GameState initial_;
    std::vector<LocSet> visible_;
    std::vector<LocSet> invisible_;
    std::vector<Entry> table_;
};

struct AssumptionViolation {
    enum class Kind { no_successor, invisible_dependence };
    Kind kind;
    GameState state;
    // For invisible_dependence: the two hidden target moves whose replies differ.
    Loc target_move = 0;
    Loc other_move = 0;
    std::string describe() const;
};

struct SuccessorReport {
    bool total = true;
    bool invisible_independent = true;
    std::vector<AssumptionViolation> violations;
    std::size_t reachable_states = 0;
    bool ok() const { return total && invisible_independent; }
};

// Checks totality and that agent replies never depend on which hidden cell the
// target moved to, over the states reachable from the initial state.
SuccessorReport validate_assumptions(const SurveillanceGame& game);

}  // namespace survsynth
