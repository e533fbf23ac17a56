#include "survsynth/strategy.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include "json.hpp"
#include <random>
#include <stdexcept>
#include <system_error>

#include "survsynth/belief.hpp"
#include "survsynth/errors.hpp"

namespace survsynth {

using ojson = nlohmann::ordered_json;

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::optional<std::uint32_t> Strategy::find(const AbstractState& s) const {
    auto it = std::lower_bound(states.begin(), states.end(), s);
    if (it == states.end() || !(*it == s)) return std::nullopt;
    return static_cast<std::uint32_t>(it - states.begin());
}

const Strategy::Move* Strategy::move(std::uint32_t state, std::uint32_t memory, std::uint32_t choice) const {
    auto key = [](const Move& m) { return std::tuple(m.state, m.memory, m.choice); };
    auto it = std::lower_bound(moves.begin(), moves.end(), std::tuple(state, memory, choice),
                               [&](const Move& m, const auto& k) { return key(m) < k; });
    if (it == moves.end() || key(*it) != std::tuple(state, memory, choice)) return nullptr;
    return &*it;
}

Strategy make_strategy(const SurveillanceGame& g, const AbstractGame& game, const AgentStrategy& as,
                       std::string digest, std::string objective) {
    (void)g;
    const Arena& arena = game.arena;
    const std::size_t mc = as.memory_count;
    std::vector<bool> seen(arena.node_count() * mc, false);
    std::deque<std::pair<NodeId, std::uint32_t>> queue{{arena.initial(), 0}};
    seen[arena.initial() * mc] = true;
    std::vector<std::tuple<NodeId, std::uint32_t, std::uint32_t, NodeId, std::uint32_t>> raw;
    while (!queue.empty()) {
        auto [n, mem] = queue.front();
        queue.pop_front();
        for (ChoiceId c = arena.first_choice(n); c < arena.end_choice(n); ++c) {
            const NodeId r = as.reply[mem][c];
            if (r == kNone) throw std::logic_error("strategy undefined on a reachable choice");
            const std::uint32_t nm = as.next_memory[mem][c];
            raw.emplace_back(n, mem, c - arena.first_choice(n), r, nm);
            if (!seen[r * mc + nm]) {
                seen[r * mc + nm] = true;
                queue.emplace_back(r, nm);
            }
        }
    }

    Strategy s;
    s.digest = std::move(digest);
    s.objective = std::move(objective);
    s.partition = game.partition;
    s.memory_count = mc;
    std::vector<std::uint32_t> index(arena.node_count(), kNone);
    for (NodeId n = 0; n < arena.node_count(); ++n)
        for (std::size_t m = 0; m < mc; ++m)
            if (seen[n * mc + m] && index[n] == kNone) {
                index[n] = static_cast<std::uint32_t>(s.states.size());
                s.states.push_back(game.states[n]);
            }
    s.initial = index[arena.initial()];
    for (auto& [n, mem, c, r, nm] : raw) s.moves.push_back({index[n], mem, c, game.states[r].agent, nm});
    std::sort(s.moves.begin(), s.moves.end(), [](const Strategy::Move& a, const Strategy::Move& b) {
        return std::tie(a.state, a.memory, a.choice) < std::tie(b.state, b.memory, b.choice);
    });
    return s;
}

namespace {

ojson cells_json(const LocSet& s) {
    ojson a = ojson::array();
    s.for_each([&](Loc l) { a.push_back(l); });
    return a;
}

LocSet cells_from(const ojson& a, std::size_t universe) {
    LocSet s(universe);
    for (const auto& v : a) {
        const auto l = v.get<std::uint64_t>();
        if (l >= universe) throw ParseError("cell out of range", 0, 0);
        s.insert(static_cast<Loc>(l));
    }
    return s;
}

constexpr const char* kFormat = "survsynth-strategy";
constexpr int kVersion = 1;

}  // namespace

std::string strategy_to_json(const Strategy& s) {
    ojson j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["digest"] = s.digest;
    j["objective"] = s.objective;
    j["universe"] = s.partition.universe();
    ojson blocks = ojson::array();
    for (const LocSet& b : s.partition.blocks()) blocks.push_back(cells_json(b));
    j["partition"] = std::move(blocks);
    j["memory_count"] = s.memory_count;
    ojson states = ojson::array();
    for (const AbstractState& a : s.states) {
        ojson e;
        e["agent"] = a.agent;
        if (a.concrete) {
            e["target"] = a.target;
        } else {
            ojson ids = ojson::array();
            a.blocks.for_each([&](Loc b) { ids.push_back(b); });
            e["blocks"] = std::move(ids);
        }
        states.push_back(std::move(e));
    }
    j["states"] = std::move(states);
    j["initial"] = s.initial;
    ojson moves = ojson::array();
    for (const Strategy::Move& m : s.moves)
        moves.push_back(ojson::array({m.state, m.memory, m.choice, m.reply, m.next_memory}));
    j["moves"] = std::move(moves);
    return j.dump(1) + "\n";
}

Strategy strategy_from_json(std::string_view text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw ParseError(std::string("strategy file: ") + e.what(), 0, e.byte);
    }
    try {
        if (j.at("format") != kFormat) throw ParseError("not a strategy file", 0, 0);
        if (j.at("version") != kVersion) throw ParseError("unsupported strategy version", 0, 0);
        Strategy s;
        s.digest = j.at("digest").get<std::string>();
        s.objective = j.at("objective").get<std::string>();
        const auto universe = j.at("universe").get<std::size_t>();
        std::vector<LocSet> blocks;
        LocSet domain(universe);
        for (const auto& b : j.at("partition")) {
            blocks.push_back(cells_from(b, universe));
            domain |= blocks.back();
        }
        try {
            s.partition = Partition(domain, std::move(blocks));
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("strategy partition: ") + e.what(), 0, 0);
        }
        s.memory_count = j.at("memory_count").get<std::size_t>();
        for (const auto& e : j.at("states")) {
            const Loc agent = e.at("agent").get<Loc>();
            if (e.contains("target")) {
                s.states.push_back(concrete_state(s.partition, agent, e.at("target").get<Loc>()));
            } else {
                BlockSet ids(s.partition.size());
                for (const auto& b : e.at("blocks")) {
                    const auto id = b.get<std::size_t>();
                    if (id >= s.partition.size()) throw ParseError("block index out of range", 0, 0);
                    ids.insert(static_cast<Loc>(id));
                }
                s.states.push_back(block_state(s.partition, agent, std::move(ids)));
            }
        }
        if (!std::is_sorted(s.states.begin(), s.states.end())) throw ParseError("states out of order", 0, 0);
        s.initial = j.at("initial").get<std::uint32_t>();
        if (s.initial >= s.states.size()) throw ParseError("initial state out of range", 0, 0);
        for (const auto& m : j.at("moves")) {
            Strategy::Move mv{m.at(0).get<std::uint32_t>(), m.at(1).get<std::uint32_t>(), m.at(2).get<std::uint32_t>(),
                              m.at(3).get<Loc>(), m.at(4).get<std::uint32_t>()};
            if (mv.state >= s.states.size() || mv.memory >= s.memory_count || mv.next_memory >= s.memory_count)
                throw ParseError("move out of range", 0, 0);
            s.moves.push_back(mv);
        }
        return s;
    } catch (const ojson::exception& e) {
        throw ParseError(std::string("strategy file: ") + e.what(), 0, 0);
    }
}

TargetPolicy TargetPolicy::parse(std::string_view name) {
    TargetPolicy p;
    if (name == "random") p.kind = Kind::random;
    else if (name == "scripted") p.kind = Kind::scripted;
    else if (name == "adversarial") p.kind = Kind::adversarial;
    else if (name == "goal-seeking") p.kind = Kind::goal_seeking;
    else throw Error("unknown target policy '" + std::string(name) + "'");
    return p;
}

std::string policy_name(TargetPolicy::Kind k) {
    switch (k) {
        case TargetPolicy::Kind::random: return "random";
        case TargetPolicy::Kind::scripted: return "scripted";
        case TargetPolicy::Kind::adversarial: return "adversarial";
        case TargetPolicy::Kind::goal_seeking: return "goal-seeking";
    }
    return "?";
}

namespace {

// Steps from each target cell to `goal` along target moves, with the agent
// held at `agent`.
std::vector<std::uint32_t> distances_to(const SurveillanceGame& g, Loc agent, Loc goal) {
    std::vector<std::vector<Loc>> pred(g.universe());
    g.target_locations().for_each([&](Loc t) {
        if (t == agent) return;
        g.succ_t(GameState{agent, t}).for_each([&](Loc u) { pred[u].push_back(t); });
    });
    std::vector<std::uint32_t> dist(g.universe(), kNone);
    std::deque<Loc> queue{goal};
    dist[goal] = 0;
    while (!queue.empty()) {
        Loc v = queue.front();
        queue.pop_front();
        for (Loc u : pred[v])
            if (dist[u] == kNone) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
    }
    return dist;
}

Loc pick_target(const SurveillanceGame& g, const TargetPolicy& p, GameState s, std::size_t step, std::mt19937_64& rng) {
    auto moves = g.moves(s);
    if (moves.empty()) throw std::logic_error("target has no move");
    switch (p.kind) {
        case TargetPolicy::Kind::random: return moves[rng() % moves.size()].target;
        case TargetPolicy::Kind::scripted: {
            if (step - 1 >= p.script.size()) throw Error("target script ran out at step " + std::to_string(step));
            const Loc want = p.script[step - 1];
            for (const TargetMove& m : moves)
                if (m.target == want) return want;
            throw Error("scripted target move to " + std::to_string(want) + " is illegal at step " + std::to_string(step));
        }
        case TargetPolicy::Kind::adversarial: {
            // Any hidden move, uniformly; a visible one only when nothing hides.
            std::vector<Loc> hidden;
            for (const TargetMove& m : moves)
                if (!g.visible(s.agent, m.target)) hidden.push_back(m.target);
            if (hidden.empty()) return moves[rng() % moves.size()].target;
            return hidden[rng() % hidden.size()];
        }
        case TargetPolicy::Kind::goal_seeking: {
            if (s.target == p.goal) return moves[rng() % moves.size()].target;
            const auto dist = distances_to(g, s.agent, p.goal);
            const TargetMove* best = &moves[0];
            for (const TargetMove& m : moves)
                if (dist[m.target] < dist[best->target]) best = &m;
            return best->target;
        }
    }
    return moves[0].target;
}

std::vector<std::pair<std::string, bool>> atom_values(const SurveillanceGame& g, const PredicateTable& preds,
                                                      const Objective& o, Loc agent, const LocSet& belief) {
    std::vector<std::pair<std::string, bool>> out;
    auto add = [&](const Atom& a) {
        for (const auto& [name, _] : out)
            if (name == a.str()) return;
        out.emplace_back(a.str(), eval_atom(g, preds, a, agent, belief));
    };
    for (const Atom& a : o.safety) add(a);
    for (const Atom& a : o.recurrence) add(a);
    return out;
}

}  // namespace

Trace simulate(const SurveillanceGame& g, const PredicateTable& preds, const Objective& o, const Strategy& s,
               const TargetPolicy& policy, std::size_t steps, std::uint64_t seed) {
    if (steps == 0) throw Error("simulation needs at least one step");
    std::mt19937_64 rng(seed);
    GameState cur = g.initial();
    LocSet belief(g.universe(), {cur.target});
    std::uint32_t state = s.initial;
    std::uint32_t memory = 0;
    if (!(s.states[state] == concrete_state(s.partition, cur.agent, cur.target)))
        throw std::logic_error("strategy does not start in the game's initial state");

    Trace trace;
    trace.push_back({0, cur.agent, cur.target, true, belief, s.states[state], memory,
                     atom_values(g, preds, o, cur.agent, belief)});
    for (std::size_t step = 1; step < steps; ++step) {
        const Loc next_t = pick_target(g, policy, cur, step, rng);
        const bool seen = g.visible(cur.agent, next_t);
        LocSet next_belief = seen ? LocSet(g.universe(), {next_t}) : g.succ_t(cur.agent, belief) & g.invisible_from(cur.agent);

        const AbstractState& abs = s.states[state];
        std::vector<AbstractChoice> choices = abstract_successors(g, s.partition, abs);
        std::uint32_t ci = 0;
        while (ci < choices.size() && !(seen ? choices[ci].concrete && choices[ci].target == next_t : !choices[ci].concrete))
            ++ci;
        if (ci == choices.size()) throw std::logic_error("observation has no abstract choice");
        const Strategy::Move* mv = s.move(state, memory, ci);
        if (!mv) throw std::logic_error("strategy undefined at step " + std::to_string(step));
        if (!g.succ_a(cur.agent, cur.target, next_t).contains(mv->reply))
            throw std::logic_error("strategy reply is not a legal move at step " + std::to_string(step));

        AbstractChoice& c = choices[ci];
        AbstractState next_abs{mv->reply, c.concrete, c.target, std::move(c.blocks), std::move(c.cells)};
        auto idx = s.find(next_abs);
        if (!idx) throw std::logic_error("replay left the strategy's states at step " + std::to_string(step));
        if (!next_belief.contains(next_t) || !next_belief.is_subset_of(next_abs.cells))
            throw std::logic_error("belief invariant broken at step " + std::to_string(step));

        cur = GameState{mv->reply, next_t};
        belief = std::move(next_belief);
        state = *idx;
        memory = mv->next_memory;
        trace.push_back({step, cur.agent, cur.target, seen, belief, s.states[state], memory,
                         atom_values(g, preds, o, cur.agent, belief)});
    }
    return trace;
}

std::string trace_to_jsonl(const Trace& t) {
    std::string out;
    for (const TraceStep& s : t) {
        ojson j;
        j["step"] = s.step;
        j["agent"] = s.agent;
        j["target"] = s.target;
        j["observed"] = s.visible ? "visible" : "hidden";
        j["belief"] = cells_json(s.belief);
        j["abstract"] = s.abstract.str();
        if (s.abstract.concrete) {
            j["abstract_target"] = s.abstract.target;
        } else {
            ojson ids = ojson::array();
            s.abstract.blocks.for_each([&](Loc b) { ids.push_back(b); });
            j["abstract_blocks"] = std::move(ids);
        }
        j["abstract_cells"] = cells_json(s.abstract.cells);
        j["memory"] = s.memory;
        ojson atoms = ojson::object();
        for (const auto& [name, v] : s.atoms) atoms[name] = v;
        j["atoms"] = std::move(atoms);
        out += j.dump() + "\n";
    }
    return out;
}

Trace trace_from_jsonl(std::string_view text, std::size_t universe) {
    Trace t;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            const ojson j = ojson::parse(line);
            TraceStep s;
            s.step = j.at("step").get<std::size_t>();
            s.agent = j.at("agent").get<Loc>();
            s.target = j.at("target").get<Loc>();
            s.visible = j.at("observed") == "visible";
            s.belief = cells_from(j.at("belief"), universe);
            s.abstract.agent = s.agent;
            s.abstract.cells = cells_from(j.at("abstract_cells"), universe);
            s.abstract.concrete = j.contains("abstract_target");
            if (s.abstract.concrete) {
                s.abstract.target = j.at("abstract_target").get<Loc>();
                s.abstract.blocks = BlockSet(0);
            } else {
                std::vector<Loc> ids;
                for (const auto& b : j.at("abstract_blocks")) ids.push_back(b.get<Loc>());
                const Loc width = ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
                s.abstract.blocks = BlockSet(width);
                for (Loc b : ids) s.abstract.blocks.insert(b);
            }
            s.memory = j.at("memory").get<std::uint32_t>();
            for (const auto& [k, v] : j.at("atoms").items()) s.atoms.emplace_back(k, v.get<bool>());
            t.push_back(std::move(s));
        } catch (const ojson::exception& e) {
            throw ParseError(std::string("trace: ") + e.what(), line_no, 1);
        } catch (const ParseError& e) {
            throw ParseError(std::string("trace: ") + e.what(), line_no, 1);
        }
    }
    return t;
}

namespace {

char glyph(const TraceStep& s, const GridWorld& g, Loc c) {
    if (g.obstacles.contains(c)) return '#';
    if (c == s.agent) return 'A';
    if (s.visible && c == s.target) return '*';
    if (s.belief.contains(c)) return '?';
    if (s.abstract.cells.contains(c)) return '+';
    if (g.goal_cells.contains(c)) return 'G';
    return '.';
}

std::string header(const TraceStep& s) {
    return "step " + std::to_string(s.step) + " agent=" + std::to_string(s.agent) +
           " belief=" + std::to_string(s.belief.size()) + " abstract=" + s.abstract.str();
}

std::string render_svg(const TraceStep& s, const GridWorld& g) {
    constexpr int kCell = 24;
    const std::size_t w = g.cols * kCell, h = g.rows * kCell + kCell;
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
                      std::to_string(h) + "\">\n";
    out += "<text x=\"2\" y=\"16\" font-family=\"monospace\" font-size=\"12\">" + header(s) + "</text>\n";
    for (std::size_t r = 0; r < g.rows; ++r)
        for (std::size_t col = 0; col < g.cols; ++col) {
            const char ch = glyph(s, g, g.cell(r, col));
            const char* fill = "#ffffff";
            switch (ch) {
                case '#': fill = "#b22222"; break;
                case '?': fill = "#909090"; break;
                case '+': fill = "#d8d8d8"; break;
                case 'G': fill = "#3cb371"; break;
                default: break;
            }
            const std::size_t x = col * kCell, y = r * kCell + kCell;
            out += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
                   std::to_string(kCell) + "\" height=\"" + std::to_string(kCell) + "\" fill=\"" + fill +
                   "\" stroke=\"#808080\"/>\n";
            if (ch == 'A' || ch == '*')
                out += "<circle cx=\"" + std::to_string(x + kCell / 2) + "\" cy=\"" + std::to_string(y + kCell / 2) +
                       "\" r=\"" + std::to_string(kCell / 3) + "\" fill=\"" + (ch == 'A' ? "#1e50c8" : "#ff8c00") +
                       "\"/>\n";
        }
    return out + "</svg>\n";
}

}  // namespace

std::string render_step(const TraceStep& s, const GridWorld& g, RenderFormat f) {
    if (f == RenderFormat::svg) return render_svg(s, g);
    std::string out = header(s) + "\n";
    for (std::size_t r = 0; r < g.rows; ++r) {
        for (std::size_t c = 0; c < g.cols; ++c) out += glyph(s, g, g.cell(r, c));
        out += '\n';
    }
    return out;
}

std::vector<std::string> render_trace(const Trace& t, const GridWorld& g, RenderFormat f) {
    std::vector<std::string> frames;
    frames.reserve(t.size());
    for (const TraceStep& s : t) frames.push_back(render_step(s, g, f));
    return frames;
}

void write_frames(const Trace& t, const GridWorld& g, RenderFormat f, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw Error("cannot create frame directory " + dir.string());
    const std::vector<std::string> frames = render_trace(t, g, f);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04zu.%s", i, f == RenderFormat::svg ? "svg" : "txt");
        std::ofstream out(dir / name, std::ios::binary);
        out << frames[i];
        if (!out) throw Error("cannot write frame " + (dir / name).string());
    }
}

}  // namespace survsynth
