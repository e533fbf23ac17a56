#include "survsynth/game_structure.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <stdexcept>

namespace survsynth {

SurveillanceGame::SurveillanceGame(std::size_t universe, LocSet agent_locations, LocSet target_locations,
                                   GameState initial)
    : universe_(universe),
      agent_locations_(std::move(agent_locations)),
      target_locations_(std::move(target_locations)),
      initial_(initial),
      visible_(universe, LocSet(universe)),
      invisible_(universe, target_locations_),
      table_(universe * universe, Entry{LocSet(universe), {}}) {
    if (agent_locations_.universe() != universe || target_locations_.universe() != universe)
        throw std::invalid_argument("location sets must share the game universe");
    if (!agent_locations_.contains(initial.agent) || !target_locations_.contains(initial.target))
        throw std::invalid_argument("initial state outside the location sets");
    if (initial.agent == initial.target) throw std::invalid_argument("agent and target start on the same cell");
}

void SurveillanceGame::set_visibility(Loc agent, LocSet visible_targets) {
    visible_targets &= target_locations_;
    invisible_[agent] = target_locations_ - visible_targets;
    visible_[agent] = std::move(visible_targets);
}

void SurveillanceGame::set_visible(Loc agent, Loc target, bool visible) {
    if (!target_locations_.contains(target)) return;
    if (visible) {
        visible_[agent].insert(target);
        invisible_[agent].erase(target);
    } else {
        visible_[agent].erase(target);
        invisible_[agent].insert(target);
    }
}

void SurveillanceGame::add_transition(GameState from, GameState to) {
    if (from.agent == from.target || to.agent == to.target)
        throw std::invalid_argument("agent and target may not share a cell");
    Entry& e = entry(from);
    e.targets.insert(to.target);
    auto it = std::lower_bound(e.moves.begin(), e.moves.end(), to.target,
                               [](const TargetMove& m, Loc t) { return m.target < t; });
    if (it == e.moves.end() || it->target != to.target) it = e.moves.insert(it, TargetMove{to.target, LocSet(universe_)});
    it->agent_replies.insert(to.agent);
}

LocSet SurveillanceGame::succ_t(Loc agent, const LocSet& beliefs) const {
    LocSet out(universe_);
    beliefs.for_each([&](Loc t) {
        if (t != agent) out |= entry({agent, t}).targets;
    });
    return out;
}

LocSet SurveillanceGame::succ_a(Loc agent, Loc target, Loc target_next) const {
    if (agent == target) return LocSet(universe_);
    for (const TargetMove& m : entry({agent, target}).moves)
        if (m.target == target_next) return m.agent_replies;
    return LocSet(universe_);
}

std::string AssumptionViolation::describe() const {
    std::string at = "(" + std::to_string(state.agent) + "," + std::to_string(state.target) + ")";
    if (kind == Kind::no_successor) return "state " + at + " has no successor";
    return "state " + at + ": agent replies after hidden target move " + std::to_string(target_move) +
           " differ from those after hidden move " + std::to_string(other_move);
}

SuccessorReport validate_assumptions(const SurveillanceGame& game) {
    SuccessorReport report;
    const std::size_t n = game.universe();
    std::vector<bool> seen(n * n, false);
    std::deque<GameState> queue{game.initial()};
    seen[game.initial().agent * n + game.initial().target] = true;

    // Per agent location, the first reply set seen after a hidden target move,
    // with the state and move that produced it.
    struct Witness {
        GameState state;
        Loc move;
        LocSet replies;
    };
    std::vector<std::optional<Witness>> hidden_replies(n);

    while (!queue.empty()) {
        GameState s = queue.front();
        queue.pop_front();
        ++report.reachable_states;

        auto moves = game.moves(s);
        bool stuck = moves.empty();
        for (const TargetMove& m : moves) stuck = stuck || m.agent_replies.empty();
        if (stuck) {
            report.total = false;
            report.violations.push_back({AssumptionViolation::Kind::no_successor, s});
        }

        for (const TargetMove& m : moves) {
            if (!game.visible(s.agent, m.target)) {
                auto& w = hidden_replies[s.agent];
                if (!w) {
                    w = Witness{s, m.target, m.agent_replies};
                } else if (!(w->replies == m.agent_replies)) {
                    report.invisible_independent = false;
                    report.violations.push_back(
                        {AssumptionViolation::Kind::invisible_dependence, s, m.target, w->move});
                }
            }
            m.agent_replies.for_each([&](Loc a) {
                std::size_t key = a * n + m.target;
                if (!seen[key]) {
                    seen[key] = true;
                    queue.push_back({a, m.target});
                }
            });
        }
    }
    return report;
}

}  // namespace survsynth
