#include "survsynth/solver.hpp"

#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "survsynth/errors.hpp"

namespace survsynth {

BitSet cpre(const Arena& arena, const BitSet& w) {
    BitSet out(arena.node_count());
    for (NodeId n = 0; n < arena.node_count(); ++n) {
        bool all = true;
        for (ChoiceId c = arena.first_choice(n); all && c < arena.end_choice(n); ++c) {
            bool some = false;
            for (NodeId r : arena.replies(c))
                if (w.contains(r)) {
                    some = true;
                    break;
                }
            all = some;
        }
        if (all) out.insert(n);
    }
    return out;
}

Attractor agent_attractor(const Arena& arena, const BitSet& within, const BitSet& goal) {
    const std::size_t n = arena.node_count();
    Attractor a{BitSet(n), std::vector<std::uint32_t>(n, kNone), {}};
    std::vector<std::uint32_t> pending(n, 0);
    std::vector<bool> satisfied(arena.choice_count(), false);
    std::deque<NodeId> queue;
    auto enter = [&](NodeId v, std::uint32_t rank) {
        a.region.insert(v);
        a.rank[v] = rank;
        queue.push_back(v);
    };
    within.for_each([&](Loc v) {
        pending[v] = static_cast<std::uint32_t>(arena.choice_count(v));
        if (goal.contains(v)) enter(v, 0);
    });
    // Nodes without choices are in cpre of anything.
    within.for_each([&](Loc v) {
        if (pending[v] == 0 && !a.region.contains(v)) enter(v, 1);
    });
    while (!queue.empty()) {
        NodeId v = queue.front();
        queue.pop_front();
        for (ChoiceId c : arena.choices_into(v)) {
            NodeId u = arena.owner(c);
            if (satisfied[c] || !within.contains(u) || a.region.contains(u)) continue;
            satisfied[c] = true;
            if (--pending[u] == 0) enter(u, a.rank[v] + 1);
        }
    }
    return a;
}

Attractor target_attractor(const Arena& arena, const BitSet& within, const BitSet& goal) {
    const std::size_t n = arena.node_count();
    Attractor a{BitSet(n), std::vector<std::uint32_t>(n, kNone), std::vector<ChoiceId>(n, kNone)};
    std::vector<std::uint32_t> pending(arena.choice_count());
    for (ChoiceId c = 0; c < arena.choice_count(); ++c) pending[c] = static_cast<std::uint32_t>(arena.replies(c).size());
    std::deque<NodeId> queue;
    goal.for_each([&](Loc v) {
        a.region.insert(v);
        a.rank[v] = 0;
        queue.push_back(v);
    });
    while (!queue.empty()) {
        NodeId v = queue.front();
        queue.pop_front();
        for (ChoiceId c : arena.choices_into(v)) {
            NodeId u = arena.owner(c);
            if (--pending[c] != 0 || !within.contains(u) || a.region.contains(u)) continue;
            a.region.insert(u);
            a.rank[u] = a.rank[v] + 1;
            a.choice[u] = c;
            queue.push_back(u);
        }
    }
    return a;
}

namespace {

ChoiceId first_choice_avoiding(const Arena& arena, NodeId s, const BitSet& avoid) {
    for (ChoiceId c = arena.first_choice(s); c < arena.end_choice(s); ++c) {
        bool clear = true;
        for (NodeId r : arena.replies(c)) clear = clear && !avoid.contains(r);
        if (clear) return c;
    }
    throw std::logic_error("target has no spoiling choice");
}

NodeId first_reply_in(const Arena& arena, ChoiceId c, const BitSet& w) {
    for (NodeId r : arena.replies(c))
        if (w.contains(r)) return r;
    return kNone;
}

}  // namespace

SolveResult solve(const Arena& arena, const WinningCondition& cond) {
    const std::size_t n = arena.node_count();
    const BitSet all = arena.full_set();
    const BitSet bad = all - cond.safe;

    TargetStrategy ts;
    ts.bad = bad;
    ts.choice.assign(n, kNone);
    ts.mode.assign(n, TargetStrategy::kSafetyMode);
    ts.layer.assign(n, kNone);

    // Safety: the agent wins exactly outside the target's attractor to `bad`.
    Attractor lose = target_attractor(arena, all - bad, bad);
    ts.safety_rank = lose.rank;
    for (NodeId v = 0; v < n; ++v)
        if (lose.region.contains(v) && !bad.contains(v)) ts.choice[v] = lose.choice[v];
    BitSet z = all - lose.region;

    const std::size_t m = cond.recurrence.size();
    std::vector<Attractor> ys;
    if (m > 0) {
        for (std::uint32_t round = 0;; ++round) {
            const BitSet keep = cpre(arena, z);
            ys.clear();
            BitSet next = z;
            for (std::size_t i = 0; i < m; ++i) {
                ys.push_back(agent_attractor(arena, z, cond.recurrence[i] & z & keep));
                next &= ys.back().region;
            }
            if (next == z) break;
            // Nodes dropping out now: the target keeps the first atom i whose
            // attractor misses the node false, or leaves z altogether.
            (z - next).for_each([&](Loc v) {
                std::size_t i = 0;
                while (ys[i].region.contains(v)) ++i;
                ts.mode[v] = static_cast<std::int32_t>(i);
                ts.layer[v] = round;
                ts.choice[v] = cond.recurrence[i].contains(v) ? first_choice_avoiding(arena, v, z)
                                                              : first_choice_avoiding(arena, v, ys[i].region);
            });
            z = std::move(next);
        }
    }

    SolveResult res;
    res.winning = z;
    res.agent_wins = z.contains(arena.initial());
    if (!res.agent_wins) {
        res.target = std::move(ts);
        return res;
    }

    AgentStrategy as;
    as.memory_count = m == 0 ? 1 : m;
    as.reply.assign(as.memory_count, std::vector<NodeId>(arena.choice_count(), kNone));
    as.next_memory.assign(as.memory_count, std::vector<std::uint32_t>(arena.choice_count(), 0));
    z.for_each([&](Loc v) {
        for (std::size_t mem = 0; mem < as.memory_count; ++mem) {
            for (ChoiceId c = arena.first_choice(v); c < arena.end_choice(v); ++c) {
                if (m == 0 || ys[mem].rank[v] == 0) {
                    as.reply[mem][c] = first_reply_in(arena, c, z);
                    as.next_memory[mem][c] = m == 0 ? 0 : static_cast<std::uint32_t>((mem + 1) % m);
                    continue;
                }
                NodeId best = kNone;
                for (NodeId r : arena.replies(c))
                    if (ys[mem].rank[r] != kNone && (best == kNone || ys[mem].rank[r] < ys[mem].rank[best])) best = r;
                as.reply[mem][c] = best;
                as.next_memory[mem][c] = static_cast<std::uint32_t>(mem);
            }
        }
    });
    res.agent = std::move(as);
    return res;
}

CexTree extract_cex_tree(const Arena& arena, const TargetStrategy& t, std::size_t max_nodes) {
    CexTree tree;
    tree.nodes.push_back({arena.initial(), kNone, kNone, {}});
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const NodeId s = tree.nodes[i].state;
        if (t.bad.contains(s)) continue;
        const ChoiceId c = t.choice[s];
        if (c == kNone || t.safety_rank[s] == kNone) throw std::logic_error("node outside the target's safety attractor");
        tree.nodes[i].choice = c;
        for (NodeId r : arena.replies(c)) {
            if (tree.nodes.size() >= max_nodes) throw BudgetExceeded("counterexample tree too large", max_nodes);
            tree.nodes[i].children.push_back(static_cast<std::uint32_t>(tree.nodes.size()));
            tree.nodes.push_back({r, static_cast<std::uint32_t>(i), kNone, {}});
        }
    }
    return tree;
}

CexGraph extract_cex_graph(const Arena& arena, const TargetStrategy& t) {
    CexGraph g;
    std::unordered_map<NodeId, std::uint32_t> index;
    auto visit = [&](NodeId s) {
        auto [it, fresh] = index.emplace(s, static_cast<std::uint32_t>(g.states.size()));
        if (fresh) {
            g.states.push_back(s);
            g.choice.push_back(kNone);
            g.succ.emplace_back();
            g.sink.push_back(false);
        }
        return it->second;
    };
    visit(arena.initial());
    for (std::size_t i = 0; i < g.states.size(); ++i) {
        const NodeId s = g.states[i];
        if (t.bad.contains(s)) {
            g.sink[i] = true;
            continue;
        }
        const ChoiceId c = t.choice[s];
        if (c == kNone) throw std::logic_error("target strategy undefined on its own play");
        g.choice[i] = c;
        std::vector<std::uint32_t> out;
        for (NodeId r : arena.replies(c)) out.push_back(visit(r));
        g.succ[i] = std::move(out);
    }
    return g;
}

}  // namespace survsynth
