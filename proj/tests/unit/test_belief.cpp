#include <deque>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "survsynth/errors.hpp"

using namespace survsynth;
using namespace testing;

namespace {

using Cells = std::set<Loc>;
using OState = std::pair<Loc, Cells>;

// Brute-force belief game over plain sets, read straight off the transition
// relation: visible target moves give singletons, all hidden ones pool.
struct OracleBeliefGame {
    std::set<OState> states;
    std::set<std::pair<OState, OState>> edges;
};

std::map<Cells, Cells> oracle_choices(const SurveillanceGame& g, Loc a, const Cells& b) {
    std::map<Cells, Cells> out;  // belief choice -> agent replies
    Cells hidden, hidden_replies;
    for (Loc t : b) {
        if (t == a) continue;
        for (const TargetMove& m : g.moves({a, t})) {
            const auto rep = m.agent_replies.to_vector();
            if (g.visible(a, m.target)) {
                out[{m.target}].insert(rep.begin(), rep.end());
            } else {
                hidden.insert(m.target);
                hidden_replies.insert(rep.begin(), rep.end());
            }
        }
    }
    if (!hidden.empty()) out[hidden].insert(hidden_replies.begin(), hidden_replies.end());
    return out;
}

OracleBeliefGame oracle_belief_game(const SurveillanceGame& g) {
    OracleBeliefGame o;
    const OState init{g.initial().agent, {g.initial().target}};
    std::deque<OState> queue{init};
    o.states.insert(init);
    while (!queue.empty()) {
        OState s = queue.front();
        queue.pop_front();
        for (const auto& [belief, replies] : oracle_choices(g, s.first, s.second))
            for (Loc a2 : replies) {
                OState next{a2, belief};
                o.edges.emplace(s, next);
                if (o.states.insert(next).second) queue.push_back(next);
            }
    }
    return o;
}

Cells to_cells(const LocSet& s) {
    auto v = s.to_vector();
    return {v.begin(), v.end()};
}

void check_against_oracle(const SurveillanceGame& g) {
    const OracleBeliefGame o = oracle_belief_game(g);
    const BeliefGame bg = build_belief_game(g);
    REQUIRE(bg.states.size() == o.states.size());
    std::set<std::pair<OState, OState>> edges;
    for (NodeId n = 0; n < bg.states.size(); ++n) {
        const OState s{bg.states[n].agent, to_cells(bg.states[n].belief)};
        CHECK(o.states.count(s) == 1);
        for (ChoiceId c = bg.arena.first_choice(n); c < bg.arena.end_choice(n); ++c)
            for (NodeId r : bg.arena.replies(c)) {
                CHECK(to_cells(bg.choice_beliefs[c]) == to_cells(bg.states[r].belief));
                edges.emplace(s, OState{bg.states[r].agent, to_cells(bg.states[r].belief)});
            }
    }
    CHECK(edges == o.edges);
    CHECK(bg.states[bg.initial()] == BeliefState{g.initial().agent, LocSet(g.universe(), {g.initial().target})});
    CHECK(std::is_sorted(bg.states.begin(), bg.states.end()));
}

}  // namespace

TEST_SUITE("belief") {
    TEST_CASE("belief successors of the initial state") {
        const SurveillanceGame& g = paper5x5().game;
        const auto choices = belief_successors(g, 4, cells({18}));
        REQUIRE(choices.size() == 2);
        CHECK(choices[0].belief == cells({17, 23}));
        CHECK_FALSE(choices[0].visible);
        CHECK(choices[0].replies == cells({3, 9}));
        CHECK(choices[1].belief == cells({19}));
        CHECK(choices[1].visible);
        CHECK(choices[1].replies == cells({3, 9}));
    }

    TEST_CASE("hidden choice after (3,{17,23})") {
        const SurveillanceGame& g = paper5x5().game;
        bool found = false;
        for (const auto& c : belief_successors(g, 3, cells({17, 23})))
            if (!c.visible) {
                CHECK(c.belief == cells({16, 18, 22, 24}));
                found = true;
            }
        CHECK(found);
    }

    TEST_CASE("no hidden choice when every successor is visible") {
        const GridWorld grid = parse_grid("A...\n....\n...T\n");
        const SurveillanceGame g = build_game_structure(grid, {}, {});
        for (const auto& c : belief_successors(g, 0, LocSet(12, {11}))) CHECK(c.visible);
    }

    TEST_CASE("surveillance predicate") {
        const SurveillanceGame& g = paper5x5().game;
        CHECK_FALSE(g.visible(3, 17));
        CHECK_FALSE(g.visible(3, 23));
        CHECK_FALSE(eval_surveillance_pred(g, 3, cells({17, 23}), 1));
        CHECK(eval_surveillance_pred(g, 3, cells({17, 23}), 2));
        g.agent_locations().for_each([&](Loc a) {
            g.visible_from(a).for_each([&](Loc t) {
                for (int k : {0, 1, 5}) CHECK(eval_surveillance_pred(g, a, cells({t}), k));
            });
        });
        // Ten cells of rows 3-4 from cell 3: well above one hidden cell.
        CHECK_FALSE(eval_surveillance_pred(g, 3, cells({15, 16, 17, 18, 19, 20, 21, 22, 23, 24}), 1));
    }

    TEST_CASE("task predicates") {
        const GridWorld grid = parse_grid(slurp(fixture("paper5x5_goal.map")));
        const SurveillanceGame g = build_game_structure(grid, {}, {});
        const PredicateTable preds = grid_predicates(grid);
        CHECK(eval_task_pred(preds, "goal", 0, cells({18})));
        CHECK(eval_task_pred(preds, "goal", 0, cells({17, 23})));
        CHECK_FALSE(eval_task_pred(preds, "goal", 4, cells({18})));
        CHECK(eval_task_pred(preds, "target_goal", 4, cells({0})));
        CHECK_FALSE(eval_task_pred(preds, "target_goal", 4, cells({0, 1})));
        CHECK_THROWS_AS(eval_task_pred(preds, "nowhere", 4, cells({0})), Error);
        CHECK_NOTHROW(check_objective(g, preds, parse_spec("GF goal")));
        CHECK_THROWS_AS(check_objective(g, preds, parse_spec("GF nowhere")), Error);
    }

    TEST_CASE("unobservable target predicate is rejected") {
        // Label 'b' marks one of two cells hidden behind the wall from A.
        const GridWorld grid = parse_grid("A#b\n.#.\n..T\n");
        const SurveillanceGame g = build_game_structure(grid, {}, {});
        const PredicateTable preds = grid_predicates(grid);
        CHECK_THROWS_WITH_AS(check_objective(g, preds, parse_spec("G target_b")),
                             doctest::Contains("not observable"), Error);
        CHECK_NOTHROW(check_objective(g, preds, parse_spec("G b")));
    }

    TEST_CASE("reachable belief game of the running example") {
        const BeliefGame bg = build_belief_game(paper5x5().game);
        CHECK(bg.states.size() == 444);
        for (const BeliefState& s : {BeliefState{3, cells({19})}, BeliefState{9, cells({17, 23})}}) {
            const auto n = bg.find(s);
            REQUIRE(n.has_value());
            // Depth one: a direct successor of the initial node.
            bool direct = false;
            for (ChoiceId c = bg.arena.first_choice(bg.initial()); c < bg.arena.end_choice(bg.initial()); ++c)
                for (NodeId r : bg.arena.replies(c)) direct = direct || r == *n;
            CHECK(direct);
        }
    }

    TEST_CASE("belief game agrees with the brute-force oracle") {
        check_against_oracle(paper5x5().game);
        const GridWorld grid = parse_grid("A.#..\n..#..\n.....\n.#.#T\n");
        for (bool stay : {false, true}) {
            MotionConfig m;
            m.allow_stay = stay;
            check_against_oracle(build_game_structure(grid, m, {}));
        }
        VisionConfig v;
        v.range = 2;
        check_against_oracle(build_game_structure(parse_grid("A....\n.....\n....T\n"), {}, v));
    }

    TEST_CASE("full visibility gives singleton beliefs only") {
        const GridWorld grid = parse_grid("A..\n...\n..T\n");
        const SurveillanceGame g = build_game_structure(grid, {}, {});
        const BeliefGame bg = build_belief_game(g);
        for (const auto& s : bg.states) CHECK(s.belief.size() == 1);
        CHECK(bg.states.size() == validate_assumptions(g).reachable_states);
    }

    TEST_CASE("state budget") {
        CHECK_THROWS_AS(build_belief_game(paper5x5().game, 100), BudgetExceeded);
        CHECK(build_belief_game(paper5x5().game, 444).states.size() == 444);
    }
}
