#include "survsynth/gridworld.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <deque>
#include <vector>

#include "survsynth/errors.hpp"

namespace survsynth {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

bool parse_bool(std::string_view v, std::size_t line, std::size_t col) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError("expected a boolean, got '" + std::string(v) + "'", line, col);
}

int parse_int(std::string_view v, std::size_t line, std::size_t col) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ParseError("expected an integer, got '" + std::string(v) + "'", line, col);
    return out;
}

// Exact rational t = num / den with den > 0.
struct Ratio {
    std::int64_t num;
    std::int64_t den;
};
bool less(Ratio a, Ratio b) { return a.num * b.den < b.num * a.den; }
Ratio make_ratio(std::int64_t num, std::int64_t den) { return den < 0 ? Ratio{-num, -den} : Ratio{num, den}; }

// Coordinates are doubled so cell centers land on odd integers.
bool segment_blocked_by(std::int64_t px, std::int64_t py, std::int64_t qx, std::int64_t qy, std::int64_t ox,
                        std::int64_t oy) {
    const std::int64_t dx = qx - px, dy = qy - py;
    Ratio lo{0, 1}, hi{1, 1};
    const std::int64_t p[2] = {px, py}, d[2] = {dx, dy}, lo_edge[2] = {2 * ox, 2 * oy};
    for (int axis = 0; axis < 2; ++axis) {
        const std::int64_t a = lo_edge[axis], b = lo_edge[axis] + 2;
        if (d[axis] == 0) {
            if (!(a < p[axis] && p[axis] < b)) return false;
            continue;
        }
        Ratio t1 = make_ratio(a - p[axis], d[axis]);
        Ratio t2 = make_ratio(b - p[axis], d[axis]);
        if (less(t2, t1)) std::swap(t1, t2);
        if (less(lo, t1)) lo = t1;
        if (less(t2, hi)) hi = t2;
    }
    if (less(lo, hi)) return true;
    if (less(hi, lo)) return false;
    // Single touching point: blocked only on the square's lower edge.
    return py * lo.den + dy * lo.num == (2 * oy + 2) * lo.den;
}

char cell_char(const GridWorld& g, Loc c) {
    if (g.obstacles.contains(c)) return '#';
    if (c == g.agent_init) return 'A';
    if (c == g.target_init) return 'T';
    if (g.goal_cells.contains(c)) return 'G';
    for (const auto& [name, cells] : g.labels)
        if (name.size() == 1 && cells.contains(c)) return name[0];
    return '.';
}

}  // namespace

LocSet GridWorld::free_cells() const {
    LocSet all(size());
    for (Loc c = 0; c < size(); ++c) all.insert(c);
    return all - obstacles;
}

GridWorld parse_grid(std::string_view text) {
    auto lines = split_lines(text);
    if (lines.empty()) throw ParseError("empty map", 1, 1);
    GridWorld g;
    g.rows = lines.size();
    g.cols = lines[0].size();
    if (g.cols == 0) throw ParseError("empty first map line", 1, 1);
    for (std::size_t r = 0; r < g.rows; ++r)
        if (lines[r].size() != g.cols)
            throw ParseError("ragged map line: expected " + std::to_string(g.cols) + " columns, got " +
                                 std::to_string(lines[r].size()),
                             r + 1, std::min(lines[r].size(), g.cols) + 1);

    const std::size_t n = g.size();
    g.obstacles = LocSet(n);
    g.goal_cells = LocSet(n);
    std::optional<Loc> agent, target;
    for (std::size_t r = 0; r < g.rows; ++r) {
        for (std::size_t c = 0; c < g.cols; ++c) {
            const char ch = lines[r][c];
            const Loc cell = g.cell(r, c);
            switch (ch) {
                case '.': break;
                case '#': g.obstacles.insert(cell); break;
                case 'A':
                    if (agent) throw ParseError("duplicate 'A'", r + 1, c + 1);
                    agent = cell;
                    break;
                case 'T':
                    if (target) throw ParseError("duplicate 'T'", r + 1, c + 1);
                    target = cell;
                    break;
                case 'G': g.goal_cells.insert(cell); break;
                default:
                    if (ch >= 'a' && ch <= 'z') {
                        auto [it, fresh] = g.labels.try_emplace(std::string(1, ch), LocSet(n));
                        it->second.insert(cell);
                        break;
                    }
                    throw ParseError(std::string("unknown map character '") + ch + "'", r + 1, c + 1);
            }
        }
    }
    if (!agent) throw ParseError("missing 'A'", g.rows, 1);
    if (!target) throw ParseError("missing 'T'", g.rows, 1);
    g.agent_init = *agent;
    g.target_init = *target;
    if (!g.goal_cells.empty()) g.labels.emplace("goal", g.goal_cells);
    return g;
}

WorldConfig parse_config(std::string_view text) {
    WorldConfig cfg;
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key=value", i + 1, 1);
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        const std::size_t vcol = eq + 2;
        if (key == "agent_radius")
            cfg.motion.agent_radius = parse_int(value, i + 1, vcol);
        else if (key == "target_radius")
            cfg.motion.target_radius = parse_int(value, i + 1, vcol);
        else if (key == "allow_stay")
            cfg.motion.allow_stay = parse_bool(value, i + 1, vcol);
        else if (key == "restrict_agent_to_visible")
            cfg.motion.restrict_agent_to_visible = parse_bool(value, i + 1, vcol);
        else if (key == "vision_range") {
            if (value == "none" || value == "inf" || value.empty())
                cfg.vision.range.reset();
            else
                cfg.vision.range = parse_int(value, i + 1, vcol);
        } else
            throw ParseError("unknown config key '" + std::string(key) + "'", i + 1, 1);
    }
    validate_config(cfg);
    return cfg;
}

void validate_config(const WorldConfig& cfg) {
    if (cfg.motion.agent_radius < 1) throw Error("agent_radius must be at least 1");
    if (cfg.motion.target_radius < 1) throw Error("target_radius must be at least 1");
    if (cfg.vision.range && *cfg.vision.range < 1) throw Error("vision_range must be at least 1");
}

std::string print_config(const WorldConfig& cfg) {
    std::string out;
    out += "agent_radius=" + std::to_string(cfg.motion.agent_radius) + "\n";
    out += "target_radius=" + std::to_string(cfg.motion.target_radius) + "\n";
    out += std::string("allow_stay=") + (cfg.motion.allow_stay ? "true" : "false") + "\n";
    out += std::string("restrict_agent_to_visible=") + (cfg.motion.restrict_agent_to_visible ? "true" : "false") +
           "\n";
    out += "vision_range=" + (cfg.vision.range ? std::to_string(*cfg.vision.range) : std::string("none")) + "\n";
    return out;
}

bool line_of_sight(const GridWorld& g, const VisionConfig& v, Loc from, Loc to) {
    if (from == to) return true;
    const auto r0 = static_cast<std::int64_t>(g.row(from)), c0 = static_cast<std::int64_t>(g.col(from));
    const auto r1 = static_cast<std::int64_t>(g.row(to)), c1 = static_cast<std::int64_t>(g.col(to));
    if (v.range) {
        const std::int64_t dr = r1 - r0, dc = c1 - c0, range = *v.range;
        if (dr * dr + dc * dc > range * range) return false;
    }
    const std::int64_t px = 2 * c0 + 1, py = 2 * r0 + 1, qx = 2 * c1 + 1, qy = 2 * r1 + 1;
    // Only obstacles inside the bounding box of the two cells can touch the segment.
    const std::int64_t rmin = std::min(r0, r1), rmax = std::max(r0, r1);
    const std::int64_t cmin = std::min(c0, c1), cmax = std::max(c0, c1);
    for (std::int64_t r = rmin; r <= rmax; ++r)
        for (std::int64_t c = cmin; c <= cmax; ++c) {
            Loc o = g.cell(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            if (g.obstacles.contains(o) && segment_blocked_by(px, py, qx, qy, c, r)) return false;
        }
    return true;
}

LocSet reachable_moves(const GridWorld& g, Loc from, int radius, bool allow_stay, const LocSet& forbidden) {
    const std::size_t n = g.size();
    std::vector<int> dist(n, -1);
    std::deque<Loc> queue{from};
    dist[from] = 0;
    LocSet out(n);
    while (!queue.empty()) {
        Loc c = queue.front();
        queue.pop_front();
        if (dist[c] > 0 && !forbidden.contains(c)) out.insert(c);
        if (dist[c] == radius) continue;
        const std::size_t r = g.row(c), col = g.col(c);
        Loc nbrs[4];
        int count = 0;
        if (r > 0) nbrs[count++] = g.cell(r - 1, col);
        if (r + 1 < g.rows) nbrs[count++] = g.cell(r + 1, col);
        if (col > 0) nbrs[count++] = g.cell(r, col - 1);
        if (col + 1 < g.cols) nbrs[count++] = g.cell(r, col + 1);
        for (int i = 0; i < count; ++i) {
            Loc nb = nbrs[i];
            if (dist[nb] >= 0 || g.obstacles.contains(nb)) continue;
            dist[nb] = dist[c] + 1;
            queue.push_back(nb);
        }
    }
    if (allow_stay && !forbidden.contains(from)) out.insert(from);
    if (out.empty()) out.insert(from);
    return out;
}

SurveillanceGame build_game_structure(const GridWorld& g, const MotionConfig& m, const VisionConfig& v) {
    validate_config(WorldConfig{m, v});
    const std::size_t n = g.size();
    if (!g.is_free(g.agent_init) || !g.is_free(g.target_init) || g.agent_init == g.target_init)
        throw Error("agent and target must start on distinct free cells");
    const LocSet free = g.free_cells();
    SurveillanceGame game(n, free, free, {g.agent_init, g.target_init});

    free.for_each([&](Loc a) {
        LocSet vis(n);
        free.for_each([&](Loc t) {
            if (line_of_sight(g, v, a, t)) vis.insert(t);
        });
        game.set_visibility(a, std::move(vis));
    });

    const LocSet none(n);
    std::vector<LocSet> agent_base(n), target_base(n);
    free.for_each([&](Loc c) {
        agent_base[c] = reachable_moves(g, c, m.agent_radius, m.allow_stay, none);
        target_base[c] = reachable_moves(g, c, m.target_radius, m.allow_stay, none);
    });
    // Removes one forbidden endpoint, keeping the {from} fallback.
    auto without = [&](const LocSet& base, Loc from, Loc forbidden) {
        LocSet out = base;
        out.erase(forbidden);
        if (out.empty()) out.insert(from);
        return out;
    };

    free.for_each([&](Loc a) {
        free.for_each([&](Loc t) {
            if (t == a) return;
            LocSet target_moves = without(target_base[t], t, a);
            target_moves.for_each([&](Loc t2) {
                LocSet replies = without(agent_base[a], a, t2);
                if (m.restrict_agent_to_visible) {
                    replies &= game.visible_from(a);
                    if (replies.empty()) replies.insert(a);
                }
                replies.for_each([&](Loc a2) { game.add_transition({a, t}, {a2, t2}); });
            });
        });
    });
    return game;
}

PredicateTable grid_predicates(const GridWorld& g) {
    PredicateTable out;
    for (const auto& [name, cells] : g.labels) {
        out.emplace(name, TaskPredicate{name, TaskPredicate::Subject::agent, cells});
        std::string tname = "target_" + name;
        out.emplace(tname, TaskPredicate{tname, TaskPredicate::Subject::target, cells});
    }
    return out;
}

std::string canonical_text(const GridWorld& g, const WorldConfig& config) {
    std::string out;
    for (std::size_t r = 0; r < g.rows; ++r) {
        for (std::size_t c = 0; c < g.cols; ++c) out += cell_char(g, g.cell(r, c));
        out += '\n';
    }
    out += print_config(config);
    return out;
}

}  // namespace survsynth
