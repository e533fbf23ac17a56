#include "survsynth/cegar.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include "survsynth/belief.hpp"
#include "survsynth/errors.hpp"

namespace survsynth {
namespace {

std::string cells_str(const LocSet& s) {
    std::string out = "{";
    bool first = true;
    s.for_each([&](Loc l) {
        if (!first) out += ",";
        out += std::to_string(l);
        first = false;
    });
    return out + "}";
}

struct NodeKey {
    std::uint32_t cex;
    LocSet belief;
    bool operator==(const NodeKey&) const = default;
};
struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const { return k.belief.hash() * 1000003u + k.cex; }
};

std::vector<std::uint32_t> path_to(const AnalysisGraph& d, std::uint32_t node) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t v = node; v != kNone; v = d.parent[v]) out.push_back(v);
    std::reverse(out.begin(), out.end());
    return out;
}

const AbstractState& label_of(const AbstractGame& game, const CexGraph& cex, const AnalysisGraph& d, std::uint32_t v) {
    return game.states[cex.states[d.nodes[v].cex]];
}

}  // namespace

LocSet propagate_belief(const SurveillanceGame& g, Loc agent, const LocSet& belief, const AbstractState& child) {
    LocSet next = g.succ_t(agent, belief);
    if (child.concrete) {
        bool keep = next.contains(child.target);
        next.clear();
        if (keep) next.insert(child.target);
        return next;
    }
    next &= child.cells;
    next &= g.invisible_from(agent);
    return next;
}

bool satisfies_atom(const SurveillanceGame& g, const PredicateTable& preds, const Atom& a, Loc agent,
                    const LocSet& belief) {
    return belief.empty() || eval_atom(g, preds, a, agent, belief);
}

bool satisfies_safety(const SurveillanceGame& g, const PredicateTable& preds, const Objective& o, Loc agent,
                      const LocSet& belief) {
    if (belief.empty()) return true;
    for (const Atom& a : o.safety)
        if (!eval_atom(g, preds, a, agent, belief)) return false;
    return true;
}

TreeAnnotation annotate_cex_tree(const SurveillanceGame& g, const AbstractGame& game, const CexTree& tree,
                                 const PredicateTable& preds, const Objective& o) {
    TreeAnnotation ann;
    ann.belief.resize(tree.nodes.size());
    ann.belief[0] = LocSet(g.universe(), {g.initial().target});
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const AbstractState& s = game.states[tree.nodes[i].state];
        for (std::uint32_t c : tree.nodes[i].children)
            ann.belief[c] = propagate_belief(g, s.agent, ann.belief[i], game.states[tree.nodes[c].state]);
    }
    // Leaves in path (depth-first, reply order) order.
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        std::uint32_t v = stack.back();
        stack.pop_back();
        const auto& node = tree.nodes[v];
        if (node.children.empty()) {
            const AbstractState& s = game.states[node.state];
            if (satisfies_safety(g, preds, o, s.agent, ann.belief[v])) ann.good_leaves.push_back(v);
        }
        for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) stack.push_back(*it);
    }
    return ann;
}

AnnotatedPath tree_path(const AbstractGame& game, const CexTree& tree, const TreeAnnotation& ann, std::uint32_t leaf) {
    AnnotatedPath path;
    for (std::uint32_t v = leaf; v != kNone; v = tree.nodes[v].parent)
        path.push_back({game.states[tree.nodes[v].state], ann.belief[v]});
    std::reverse(path.begin(), path.end());
    return path;
}

std::optional<AnnotatedPath> annotate_tree(const SurveillanceGame& g, const AbstractGame& game, const CexTree& tree,
                                           const PredicateTable& preds, const Objective& o) {
    TreeAnnotation ann = annotate_cex_tree(g, game, tree, preds, o);
    if (ann.good_leaves.empty()) return std::nullopt;
    return tree_path(game, tree, ann, ann.good_leaves.front());
}

Partition refine_safety(const SurveillanceGame& g, const Partition& q, const AnnotatedPath& path) {
    if (path.empty()) throw std::invalid_argument("empty counterexample path");
    Partition out = q;
    const std::size_t n = path.size() - 1;
    const PathStep& leaf = path[n];
    LocSet kept = leaf.belief;
    if (!leaf.label.concrete) {
        out.split(leaf.label.cells, leaf.belief);
    } else {
        kept &= leaf.label.cells;
    }
    for (std::size_t j = n; j-- > 0;) {
        const PathStep& step = path[j];
        const AbstractState& next = path[j + 1].label;
        const Loc agent = step.label.agent;
        LocSet relevant = next.cells;
        if (!next.concrete) relevant &= g.invisible_from(agent);

        auto stays_inside = [&](Loc l) {
            LocSet succ = g.succ_t(agent, LocSet(g.universe(), {l}));
            succ &= relevant;
            return succ.is_subset_of(kept);
        };
        if (step.label.concrete) {
            if (stays_inside(step.label.target)) break;
            kept.clear();
            continue;
        }
        LocSet keep(g.universe());
        step.label.cells.for_each([&](Loc l) {
            if (stays_inside(l)) keep.insert(l);
        });
        out.split(step.label.cells, keep);
        kept = std::move(keep);
    }
    return out;
}

AnalysisGraph build_analysis_graph(const SurveillanceGame& g, const AbstractGame& game, const CexGraph& cex,
                                   std::size_t max_nodes) {
    AnalysisGraph d;
    std::unordered_map<NodeKey, std::uint32_t, NodeKeyHash> index;
    auto visit = [&](std::uint32_t v, LocSet belief, std::uint32_t parent) {
        NodeKey key{v, std::move(belief)};
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        if (d.nodes.size() >= max_nodes) throw BudgetExceeded("analysis graph too large", max_nodes);
        auto id = static_cast<std::uint32_t>(d.nodes.size());
        d.nodes.push_back({key.belief, v});
        d.succ.emplace_back();
        d.parent.push_back(parent);
        index.emplace(std::move(key), id);
        return id;
    };
    visit(0, LocSet(g.universe(), {g.initial().target}), kNone);
    for (std::uint32_t i = 0; i < d.nodes.size(); ++i) {
        const std::uint32_t v = d.nodes[i].cex;
        if (cex.sink[v]) continue;
        const AbstractState& s = game.states[cex.states[v]];
        std::vector<std::uint32_t> out;
        for (std::uint32_t w : cex.succ[v]) {
            LocSet b = propagate_belief(g, s.agent, d.nodes[i].belief, game.states[cex.states[w]]);
            out.push_back(visit(w, std::move(b), i));
        }
        d.succ[i] = std::move(out);
    }
    return d;
}

std::vector<bool> on_cycle(const AnalysisGraph& d) {
    // Iterative Tarjan; a node is on a cycle iff its component has more than
    // one node or it has a self-loop.
    const std::size_t n = d.nodes.size();
    std::vector<std::uint32_t> index(n, kNone), low(n, 0), comp(n, kNone);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::vector<std::size_t> comp_size;
    std::uint32_t counter = 0;
    struct Frame {
        std::uint32_t v;
        std::size_t next;
    };
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kNone) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.next < d.succ[f.v].size()) {
                std::uint32_t w = d.succ[f.v][f.next++];
                if (index[w] == kNone) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const std::uint32_t v = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                auto id = static_cast<std::uint32_t>(comp_size.size());
                std::size_t size = 0;
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = id;
                    ++size;
                } while (w != v);
                comp_size.push_back(size);
            }
        }
    }
    std::vector<bool> out(n, false);
    for (std::uint32_t v = 0; v < n; ++v) {
        out[v] = comp_size[comp[v]] > 1;
        for (std::uint32_t w : d.succ[v]) out[v] = out[v] || w == v;
    }
    return out;
}

Lasso lasso_through(const AnalysisGraph& d, std::uint32_t g) {
    Lasso l;
    l.stem = path_to(d, g);
    // Shortest way back to g, by BFS from g's successors.
    std::vector<std::uint32_t> from(d.nodes.size(), kNone);
    std::deque<std::uint32_t> queue;
    for (std::uint32_t w : d.succ[g]) {
        if (w == g) {
            l.cycle = {g, g};
            return l;
        }
        if (from[w] == kNone) {
            from[w] = g;
            queue.push_back(w);
        }
    }
    while (!queue.empty()) {
        std::uint32_t v = queue.front();
        queue.pop_front();
        for (std::uint32_t w : d.succ[v]) {
            if (w == g) {
                std::vector<std::uint32_t> back{g};
                for (std::uint32_t u = v; u != g; u = from[u]) back.push_back(u);
                back.push_back(g);
                l.cycle.assign(back.rbegin(), back.rend());
                return l;
            }
            if (from[w] == kNone) {
                from[w] = v;
                queue.push_back(w);
            }
        }
    }
    throw std::invalid_argument("node is not on a cycle");
}

std::optional<Lasso> find_good_lasso(const SurveillanceGame& g, const AbstractGame& game, const CexGraph& cex,
                                     const AnalysisGraph& d, int k) {
    std::vector<bool> cyc = on_cycle(d);
    for (std::uint32_t v = 0; v < d.nodes.size(); ++v) {
        if (!cyc[v]) continue;
        const LocSet& b = d.nodes[v].belief;
        if (b.empty() || eval_surveillance_pred(g, label_of(game, cex, d, v).agent, b, k)) return lasso_through(d, v);
    }
    return std::nullopt;
}

AnnotatedPath analysis_path(const AbstractGame& game, const CexGraph& cex, const AnalysisGraph& d,
                            const std::vector<std::uint32_t>& nodes) {
    AnnotatedPath path;
    for (std::uint32_t v : nodes) path.push_back({label_of(game, cex, d, v), d.nodes[v].belief});
    return path;
}

Partition refine_liveness(const SurveillanceGame& g, const Partition& q, const AbstractGame& game,
                          const CexGraph& cex, const AnalysisGraph& d, const Lasso& lasso) {
    std::vector<std::uint32_t> full = lasso.stem;
    full.insert(full.end(), lasso.cycle.begin() + 1, lasso.cycle.end());
    Partition whole = refine_safety(g, q, analysis_path(game, cex, d, full));
    Partition stem = refine_safety(g, q, analysis_path(game, cex, d, lasso.stem));
    return meet(whole, stem);
}

std::string kind_name(Refinement::Kind k) {
    switch (k) {
        case Refinement::Kind::tree_path: return "tree-path";
        case Refinement::Kind::sink_path: return "sink-path";
        case Refinement::Kind::lasso: return "lasso";
        case Refinement::Kind::strict_subset: return "strict-subset";
    }
    return "?";
}

std::optional<Refinement> analyze_general(const SurveillanceGame& g, const PredicateTable& preds,
                                          const Objective& o, const AbstractGame& game, const TargetStrategy& t,
                                          const CexGraph& cex, const AnalysisGraph& d) {
    const Partition& q = game.partition;
    bool witnessed = false;

    for (std::uint32_t v = 0; v < d.nodes.size(); ++v) {
        if (!cex.sink[d.nodes[v].cex]) continue;
        if (!satisfies_safety(g, preds, o, label_of(game, cex, d, v).agent, d.nodes[v].belief)) continue;
        witnessed = true;
        Partition p = refine_safety(g, q, analysis_path(game, cex, d, path_to(d, v)));
        if (p.size() > q.size()) return Refinement{Refinement::Kind::sink_path, std::move(p)};
    }

    std::vector<bool> cyc = on_cycle(d);
    for (std::uint32_t v = 0; v < d.nodes.size(); ++v) {
        if (!cyc[v]) continue;
        const std::int32_t mode = t.mode[cex.states[d.nodes[v].cex]];
        if (mode < 0) continue;
        const Atom& atom = o.recurrence[static_cast<std::size_t>(mode)];
        if (!satisfies_atom(g, preds, atom, label_of(game, cex, d, v).agent, d.nodes[v].belief)) continue;
        witnessed = true;
        Partition p = refine_liveness(g, q, game, cex, d, lasso_through(d, v));
        if (p.size() > q.size()) return Refinement{Refinement::Kind::lasso, std::move(p)};
    }

    if (!witnessed) return std::nullopt;
    for (std::uint32_t v = 0; v < d.nodes.size(); ++v) {
        const LocSet& b = d.nodes[v].belief;
        const AbstractState& s = label_of(game, cex, d, v);
        if (!(b.is_subset_of(s.cells) && !(b == s.cells))) continue;
        Partition p = refine_safety(g, q, analysis_path(game, cex, d, path_to(d, v)));
        if (p.size() > q.size()) return Refinement{Refinement::Kind::strict_subset, std::move(p)};
    }
    throw std::logic_error("spurious counterexample but no refinement adds blocks");
}

WinningCondition abstract_condition(const SurveillanceGame& g, const PredicateTable& preds, const Objective& o,
                                    const AbstractGame& game) {
    return make_condition(o, game.states.size(), [&](const Atom& a, NodeId n) {
        const AbstractState& s = game.states[n];
        return eval_atom(g, preds, a, s.agent, s.cells);
    });
}

namespace {

std::string dump_tree(const AbstractGame& game, const CexTree& tree, const TreeAnnotation& ann) {
    std::string out = "# concrete counterexample tree: node parent agent belief abstract\n";
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const AbstractState& s = game.states[tree.nodes[i].state];
        out += "v" + std::to_string(i) + " parent=" +
               (tree.nodes[i].parent == kNone ? std::string("-") : "v" + std::to_string(tree.nodes[i].parent)) +
               " agent=" + std::to_string(s.agent) + " belief=" + cells_str(ann.belief[i]) + " abstract=" + s.str() +
               (tree.nodes[i].children.empty() ? " leaf" : "") + "\n";
    }
    return out;
}

std::string dump_graph(const AbstractGame& game, const CexGraph& cex, const AnalysisGraph& d) {
    std::string out = "# concrete counterexample graph: node agent belief abstract -> successors\n";
    for (std::uint32_t v = 0; v < d.nodes.size(); ++v) {
        const AbstractState& s = label_of(game, cex, d, v);
        out += "d" + std::to_string(v) + " agent=" + std::to_string(s.agent) + " belief=" + cells_str(d.nodes[v].belief) +
               " abstract=" + s.str() + " ->";
        if (d.succ[v].empty()) out += " sink";
        for (std::uint32_t w : d.succ[v]) out += " d" + std::to_string(w);
        out += "\n";
    }
    return out;
}

}  // namespace

CegarOutcome cegar_loop(const SurveillanceGame& g, const PredicateTable& preds, const Objective& o,
                        const Partition& initial, const CegarOptions& options) {
    check_objective(g, preds, o);
    if (auto bad = uniformity_violation(initial, preds, task_names(o)))
        throw Error("initial partition is not uniform for predicate '" + *bad + "'");

    CegarOutcome out;
    Partition q = initial;
    for (std::size_t iter = 1; iter <= options.max_iters; ++iter) {
        out.iterations = iter;
        out.partition = q;
        std::string line = "iter=" + std::to_string(iter) + " blocks=" + std::to_string(q.size());
        bool solved = false;
        try {
            AbstractGame game = build_abstract_game(g, q, options.max_states);
            line += " states=" + std::to_string(game.states.size());
            SolveResult res = solve(game.arena, abstract_condition(g, preds, o, game));
            if (res.agent_wins) {
                out.transcript.push_back(line + " verdict=agent action=done");
                out.verdict = CegarOutcome::Verdict::realizable;
                out.strategy = std::move(res.agent);
                out.game = std::move(game);
                return out;
            }
            line += " verdict=target";
            solved = true;
            const TargetStrategy& ts = *res.target;

            std::optional<Refinement> ref;
            bool need_graph = true;
            if (o.pure_safety()) {
                try {
                    CexTree tree = extract_cex_tree(game.arena, ts, options.max_tree_nodes);
                    TreeAnnotation ann = annotate_cex_tree(g, game, tree, preds, o);
                    if (ann.good_leaves.empty()) {
                        out.transcript.push_back(line + " action=concretizable");
                        out.verdict = CegarOutcome::Verdict::unrealizable;
                        out.counterexample = dump_tree(game, tree, ann);
                        out.game = std::move(game);
                        return out;
                    }
                    for (std::uint32_t leaf : ann.good_leaves) {
                        Partition p = refine_safety(g, q, tree_path(game, tree, ann, leaf));
                        if (p.size() > q.size()) {
                            ref = Refinement{Refinement::Kind::tree_path, std::move(p)};
                            break;
                        }
                    }
                    need_graph = !ref;
                } catch (const BudgetExceeded&) {
                    need_graph = true;
                }
            }
            if (need_graph) {
                CexGraph cex = extract_cex_graph(game.arena, ts);
                AnalysisGraph d = build_analysis_graph(g, game, cex, options.max_states);
                ref = analyze_general(g, preds, o, game, ts, cex, d);
                if (!ref) {
                    out.transcript.push_back(line + " action=concretizable");
                    out.verdict = CegarOutcome::Verdict::unrealizable;
                    out.counterexample = dump_graph(game, cex, d);
                    out.game = std::move(game);
                    return out;
                }
            }
            out.transcript.push_back(line + " action=refine-" + kind_name(ref->kind) + " next_blocks=" +
                                     std::to_string(ref->partition.size()));
            q = std::move(ref->partition);
        } catch (const BudgetExceeded& e) {
            out.transcript.push_back(line + (solved ? "" : " verdict=none") + " action=budget-exceeded");
            out.verdict = CegarOutcome::Verdict::budget_exceeded;
            out.budget_message = e.what();
            return out;
        }
    }
    out.verdict = CegarOutcome::Verdict::budget_exceeded;
    out.budget_message = "iteration budget exceeded (limit " + std::to_string(options.max_iters) + ")";
    out.transcript.push_back("iter=" + std::to_string(options.max_iters + 1) + " blocks=" + std::to_string(q.size()) +
                             " verdict=none action=budget-exceeded");
    out.partition = q;
    return out;
}

}  // namespace survsynth
