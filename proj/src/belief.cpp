#include "survsynth/belief.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "survsynth/errors.hpp"

namespace survsynth {

std::vector<BeliefChoice> belief_successors(const SurveillanceGame& g, Loc agent, const LocSet& cells) {
    const std::size_t n = g.universe();
    LocSet hidden(n), hidden_replies(n);
    std::vector<std::pair<Loc, const LocSet*>> seen;
    cells.for_each([&](Loc t) {
        if (t == agent) return;
        for (const TargetMove& m : g.moves({agent, t})) {
            if (g.visible(agent, m.target)) {
                seen.emplace_back(m.target, &m.agent_replies);
            } else {
                hidden.insert(m.target);
                hidden_replies |= m.agent_replies;
            }
        }
    });
    std::sort(seen.begin(), seen.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<BeliefChoice> out;
    for (std::size_t i = 0; i < seen.size();) {
        BeliefChoice c{LocSet(n), true, *seen[i].second};
        c.belief.insert(seen[i].first);
        std::size_t j = i + 1;
        for (; j < seen.size() && seen[j].first == seen[i].first; ++j) c.replies |= *seen[j].second;
        out.push_back(std::move(c));
        i = j;
    }
    if (!hidden.empty()) out.push_back(BeliefChoice{std::move(hidden), false, std::move(hidden_replies)});
    std::sort(out.begin(), out.end(), [](const BeliefChoice& a, const BeliefChoice& b) { return a.belief < b.belief; });
    return out;
}

bool eval_surveillance_pred(const SurveillanceGame& g, Loc agent, const LocSet& cells, int k) {
    return cells.count_outside(g.visible_from(agent)) <= static_cast<std::size_t>(k);
}

bool eval_task_pred(const PredicateTable& preds, const std::string& name, Loc agent, const LocSet& cells) {
    auto it = preds.find(name);
    if (it == preds.end()) throw Error("undeclared predicate '" + name + "'");
    const TaskPredicate& p = it->second;
    if (p.subject == TaskPredicate::Subject::agent) return p.cells.contains(agent);
    return cells.is_subset_of(p.cells);
}

bool eval_atom(const SurveillanceGame& g, const PredicateTable& preds, const Atom& atom, Loc agent,
               const LocSet& cells) {
    if (atom.kind == Atom::Kind::surveillance) return eval_surveillance_pred(g, agent, cells, atom.k);
    return eval_task_pred(preds, atom.name, agent, cells);
}

void check_observable(const SurveillanceGame& g, const TaskPredicate& p) {
    if (p.subject == TaskPredicate::Subject::agent) return;
    g.agent_locations().for_each([&](Loc a) {
        const LocSet& hidden = g.invisible_from(a);
        LocSet inside = hidden & p.cells;
        if (!inside.empty() && !(inside == hidden)) {
            Loc in = inside.first(), out = (hidden - p.cells).first();
            throw Error("predicate '" + p.name + "' is not observable: from agent cell " + std::to_string(a) +
                        " hidden cells " + std::to_string(in) + " and " + std::to_string(out) + " disagree");
        }
    });
}

void check_objective(const SurveillanceGame& g, const PredicateTable& preds, const Objective& o) {
    for (const std::string& name : task_names(o)) {
        auto it = preds.find(name);
        if (it == preds.end()) throw Error("undeclared predicate '" + name + "'");
        check_observable(g, it->second);
    }
}

std::optional<NodeId> BeliefGame::find(const BeliefState& s) const {
    auto it = std::lower_bound(states.begin(), states.end(), s);
    if (it == states.end() || !(*it == s)) return std::nullopt;
    return static_cast<NodeId>(it - states.begin());
}

BeliefGame build_belief_game(const SurveillanceGame& g, std::size_t max_states) {
    const std::size_t n = g.universe();
    BeliefState init{g.initial().agent, LocSet(n, {g.initial().target})};

    // Discovery only; edges are recomputed once the state count is known to fit.
    std::unordered_map<BeliefState, NodeId, BeliefStateHash> seen;
    std::vector<BeliefState> order{init};
    seen.emplace(init, 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Loc agent = order[i].agent;
        const LocSet belief = order[i].belief;
        for (BeliefChoice& c : belief_successors(g, agent, belief)) {
            c.replies.for_each([&](Loc a) {
                BeliefState next{a, c.belief};
                if (seen.contains(next)) return;
                if (order.size() >= max_states) throw BudgetExceeded("belief game state budget exceeded", max_states);
                seen.emplace(next, static_cast<NodeId>(order.size()));
                order.push_back(std::move(next));
            });
        }
    }
    seen.clear();

    BeliefGame game;
    std::sort(order.begin(), order.end());
    game.states = std::move(order);
    std::vector<NodeId> replies;
    for (const BeliefState& s : game.states) {
        game.arena.open_node();
        for (BeliefChoice& c : belief_successors(g, s)) {
            replies.clear();
            c.replies.for_each([&](Loc a) { replies.push_back(*game.find({a, c.belief})); });
            game.arena.add_choice(replies);
            game.choice_beliefs.push_back(std::move(c.belief));
        }
    }
    game.arena.finish(*game.find(init));
    return game;
}

}  // namespace survsynth
