#pragma once
// Shared loaders for the test binaries. SURVSYNTH_FIXTURES is set by CMake.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "survsynth/abstraction.hpp"
#include "survsynth/belief.hpp"
#include "survsynth/game_structure.hpp"
#include "survsynth/gridworld.hpp"
#include "survsynth/objective.hpp"

namespace testing {

using namespace survsynth;

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(SURVSYNTH_FIXTURES) / name;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct World {
    GridWorld grid;
    WorldConfig config;
    SurveillanceGame game;
    PredicateTable preds;
};

inline World load(const std::string& map, const std::string& cfg) {
    GridWorld grid = parse_grid(slurp(fixture(map)));
    WorldConfig config = parse_config(slurp(fixture(cfg)));
    SurveillanceGame game = build_game_structure(grid, config.motion, config.vision);
    PredicateTable preds = grid_predicates(grid);
    return World{std::move(grid), config, std::move(game), std::move(preds)};
}

inline const World& paper5x5() {
    static const World w = load("paper5x5.map", "paper5x5.cfg");
    return w;
}

inline LocSet cells(std::initializer_list<Loc> items) { return LocSet(25, items); }

// Row blocks of the running example: {0..4}, {5..9}, {10,14}, {15..19}, {20..24}.
inline Partition rows_partition() {
    const World& w = paper5x5();
    return parse_partition(slurp(fixture("paper5x5_rows.part")), w.game.target_locations());
}

// Columns 0-1 against columns 2-4.
inline Partition cols_partition() {
    const World& w = paper5x5();
    return parse_partition(slurp(fixture("paper5x5_cols.part")), w.game.target_locations());
}

inline Partition one_block(const SurveillanceGame& g) { return Partition(g.target_locations(), {g.target_locations()}); }

inline std::string show(const LocSet& s) {
    std::string out = "{";
    s.for_each([&](Loc l) { out += (out.size() > 1 ? "," : "") + std::to_string(l); });
    return out + "}";
}

}  // namespace testing
