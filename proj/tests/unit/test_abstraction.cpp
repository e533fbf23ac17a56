#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "survsynth/errors.hpp"

using namespace survsynth;
using namespace testing;

namespace {

LocSet random_subset(std::mt19937_64& rng, const LocSet& of, int one_in) {
    LocSet s(of.universe());
    of.for_each([&](Loc l) {
        if (rng() % one_in == 0) s.insert(l);
    });
    return s;
}

Partition random_partition(std::mt19937_64& rng, const LocSet& domain, std::size_t max_blocks) {
    std::vector<LocSet> blocks(1 + rng() % max_blocks, LocSet(domain.universe()));
    domain.for_each([&](Loc l) { blocks[rng() % blocks.size()].insert(l); });
    std::erase_if(blocks, [](const LocSet& b) { return b.empty(); });
    return Partition(domain, blocks);
}

// Every block of `fine` inside a block of `coarse`, by cell membership.
bool oracle_refines(const Partition& fine, const Partition& coarse) {
    for (const LocSet& b : fine.blocks()) {
        std::set<std::size_t> owners;
        b.for_each([&](Loc l) { owners.insert(coarse.block_of(l)); });
        if (owners.size() != 1) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("abstraction") {
    TEST_CASE("rows partition: alpha and gamma") {
        const Partition q = rows_partition();
        REQUIRE(q.size() == 5);
        const BlockSet q45 = q.alpha(cells({17, 23}));
        CHECK(q45 == BlockSet(5, {3, 4}));
        CHECK(q.gamma(q45) == cells({15, 16, 17, 18, 19, 20, 21, 22, 23, 24}));
        CHECK(q.alpha(cells({})).empty());
        for (std::size_t i = 0; i < q.size(); ++i) CHECK(q.alpha(q.block(i)) == BlockSet(5, {static_cast<Loc>(i)}));
    }

    TEST_CASE("abstract successors of the initial state") {
        const SurveillanceGame& g = paper5x5().game;
        const Partition q = rows_partition();
        const auto choices = abstract_successors(g, q, concrete_state(q, 4, 18));
        REQUIRE(choices.size() == 2);
        // Ordered by cell content: the hidden pair of rows comes first.
        CHECK_FALSE(choices[0].concrete);
        CHECK(choices[0].blocks == BlockSet(5, {3, 4}));
        CHECK(choices[0].replies == cells({3, 9}));
        CHECK(choices[1].concrete);
        CHECK(choices[1].target == 19);
        CHECK(choices[1].replies == cells({3, 9}));
    }

    TEST_CASE("abstract state for the rows pair violates p<=1") {
        const SurveillanceGame& g = paper5x5().game;
        const AbstractState s = block_state(rows_partition(), 3, BlockSet(5, {3, 4}));
        CHECK(s.cells.size() == 10);
        CHECK_FALSE(eval_surveillance_pred(g, s.agent, s.cells, 1));
    }

    TEST_CASE("columns partition: hidden choice from (3,{Q2})") {
        const SurveillanceGame& g = paper5x5().game;
        const Partition q = cols_partition();
        REQUIRE(q.size() == 2);
        CHECK(q.block(0) == cells({0, 1, 5, 6, 10, 15, 16, 20, 21}));
        bool found = false;
        for (const auto& c : abstract_successors(g, q, block_state(q, 3, BlockSet(2, {1}))))
            if (!c.concrete) {
                CHECK(c.blocks == BlockSet(2, {0, 1}));
                found = true;
            }
        CHECK(found);
        const AbstractGame game = build_abstract_game(g, q);
        for (Loc a : {3u, 9u}) {
            CHECK(game.find(block_state(q, a, BlockSet(2, {1}))).has_value());
            CHECK(game.find(block_state(q, a, BlockSet(2, {0, 1}))).has_value());
        }
        CHECK(game.find(concrete_state(q, 4, 18)) == game.initial());
    }

    TEST_CASE("finest partition reproduces the belief game") {
        const SurveillanceGame& g = paper5x5().game;
        std::vector<LocSet> singles;
        g.target_locations().for_each([&](Loc l) { singles.push_back(LocSet(25, {l})); });
        const Partition q(g.target_locations(), singles);
        const AbstractGame game = build_abstract_game(g, q);
        const BeliefGame bg = build_belief_game(g);
        // Concrete and singleton-block labels of the same hidden cell are
        // distinct abstract states, so compare the underlying beliefs.
        std::set<std::pair<Loc, std::vector<Loc>>> a, b;
        for (const auto& s : game.states) a.emplace(s.agent, s.cells.to_vector());
        for (const auto& s : bg.states) b.emplace(s.agent, s.belief.to_vector());
        CHECK(a == b);
        // And choices match one to one.
        for (const auto& s : game.states) {
            auto ac = abstract_successors(g, q, s);
            auto bc = belief_successors(g, s.agent, s.cells);
            REQUIRE(ac.size() == bc.size());
            for (std::size_t i = 0; i < ac.size(); ++i) {
                CHECK(ac[i].cells == bc[i].belief);
                CHECK(ac[i].replies == bc[i].replies);
            }
        }
    }

    TEST_CASE("gamma of alpha overapproximates") {
        const SurveillanceGame& g = paper5x5().game;
        std::mt19937_64 rng(9);
        for (int i = 0; i < 300; ++i) {
            const Partition q = random_partition(rng, g.target_locations(), 8);
            const LocSet b = random_subset(rng, g.target_locations(), 4);
            const LocSet cover = q.gamma(q.alpha(b));
            CHECK(b.is_subset_of(cover));
            // Each covering block meets b.
            q.alpha(b).for_each([&](Loc blk) { CHECK(q.block(blk).intersects(b)); });
        }
    }

    TEST_CASE("split, refines and meet") {
        const SurveillanceGame& g = paper5x5().game;
        const LocSet& dom = g.target_locations();
        Partition q = cols_partition();
        const Partition before = q;
        CHECK(refines(q, q));
        CHECK(q.split(cells({0, 1, 5, 6, 10, 15, 16, 20, 21}), cells({16})));
        CHECK(q.size() == 3);
        CHECK(refines(q, before));
        CHECK_FALSE(refines(before, q));
        // Splitting by a superset cuts nothing.
        CHECK_FALSE(q.split(dom, dom));
        // Scope only admits blocks inside it.
        CHECK_FALSE(q.split(cells({2, 3}), cells({2})));

        const Partition rows = rows_partition();
        CHECK_FALSE(refines(rows, before));
        CHECK_FALSE(refines(before, rows));
        const Partition m = meet(rows, before);
        CHECK(refines(m, rows));
        CHECK(refines(m, before));
        CHECK(m.size() == 10);  // {10,14} splits too

        std::mt19937_64 rng(17);
        for (int i = 0; i < 200; ++i) {
            const Partition a = random_partition(rng, dom, 5), b = random_partition(rng, dom, 5);
            const Partition ab = meet(a, b);
            CHECK(refines(ab, a) == oracle_refines(ab, a));
            CHECK(refines(ab, a));
            CHECK(refines(ab, b));
            CHECK(refines(a, b) == oracle_refines(a, b));
            // Meet is the coarsest common refinement: two cells share a block
            // exactly when they share blocks in both.
            dom.for_each([&](Loc x) {
                dom.for_each([&](Loc y) {
                    const bool together = ab.block_of(x) == ab.block_of(y);
                    CHECK(together == (a.block_of(x) == a.block_of(y) && b.block_of(x) == b.block_of(y)));
                });
            });
        }
    }

    TEST_CASE("block ids and parents survive splits") {
        Partition q = cols_partition();
        const BlockId root = q.id(0);
        q.split(q.block(0), cells({16}));
        bool saw_child = false;
        for (std::size_t i = 0; i < q.size(); ++i)
            if (q.block(i).is_subset_of(cells({0, 1, 5, 6, 10, 15, 16, 20, 21})))
                saw_child = saw_child || q.parent(i) == root;
        CHECK(saw_child);
    }

    TEST_CASE("initial partition") {
        const SurveillanceGame& g = paper5x5().game;
        const PredicateTable none;
        CHECK(initial_partition(g, none, {}).size() == 1);
        CHECK(initial_partition(g, none, {}).block(0).size() == 22);

        const GridWorld grid = parse_grid(slurp(fixture("paper5x5_goal.map")));
        const SurveillanceGame gg = build_game_structure(grid, {}, {});
        const PredicateTable preds = grid_predicates(grid);
        CHECK(initial_partition(gg, preds, {"goal"}).size() == 1);
        const Partition two = initial_partition(gg, preds, {"target_goal"});
        CHECK(two.size() == 2);
        CHECK(!uniformity_violation(two, preds, {"target_goal"}));
        CHECK(uniformity_violation(one_block(gg), preds, {"target_goal"}) == "target_goal");
        CHECK(!uniformity_violation(one_block(gg), preds, {"goal"}));
        CHECK_THROWS_AS(uniformity_violation(one_block(gg), preds, {"nowhere"}), Error);
    }

    TEST_CASE("partition text round trip and errors") {
        const Partition q = rows_partition();
        const LocSet& dom = paper5x5().game.target_locations();
        CHECK(parse_partition(dump_partition(q), dom) == q);
        CHECK_THROWS(parse_partition("0,1,2\n", dom));            // does not cover
        CHECK_THROWS(parse_partition(dump_partition(q) + "3\n", dom));  // overlap
        CHECK_THROWS(parse_partition("0,x\n", dom));
        CHECK_THROWS_AS(Partition(dom, {dom, LocSet(25, {0})}), std::invalid_argument);
    }

    TEST_CASE("abstract state count bound") {
        const SurveillanceGame& g = paper5x5().game;
        for (const Partition& q : {rows_partition(), cols_partition(), one_block(g)}) {
            const AbstractGame game = build_abstract_game(g, q);
            const std::size_t bound =
                g.agent_locations().size() * (g.target_locations().size() + (std::size_t{1} << q.size()));
            CHECK(game.states.size() <= bound);
            CHECK(std::is_sorted(game.states.begin(), game.states.end()));
        }
        CHECK_THROWS_AS(build_abstract_game(g, rows_partition(), 10), BudgetExceeded);
    }
}
