#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "survsynth/bitset.hpp"
#include "survsynth/game_structure.hpp"
#include "survsynth/objective.hpp"

namespace survsynth {

// Rectangular map; cells are row-major indices. Letter labels name cell sets for
// task predicates; 'G' cells are also collected under the label "goal".
struct GridWorld {
    std::size_t rows = 0;
    std::size_t cols = 0;
    LocSet obstacles;
    Loc agent_init = 0;
    Loc target_init = 0;
    LocSet goal_cells;
    std::map<std::string, LocSet> labels;

    std::size_t size() const { return rows * cols; }
    Loc cell(std::size_t row, std::size_t col) const { return static_cast<Loc>(row * cols + col); }
    std::size_t row(Loc c) const { return c / cols; }
    std::size_t col(Loc c) const { return c % cols; }
    bool in_range(Loc c) const { return c < size(); }
    bool is_free(Loc c) const { return in_range(c) && !obstacles.contains(c); }
    LocSet free_cells() const;
};

struct MotionConfig {
    int agent_radius = 1;
    int target_radius = 1;
    bool allow_stay = false;
    bool restrict_agent_to_visible = false;
};

struct VisionConfig {
    std::optional<int> range;  // Euclidean, between cell centers; unlimited when empty
};

struct WorldConfig {
    MotionConfig motion;
    VisionConfig vision;
};

GridWorld parse_grid(std::string_view text);

// key=value lines; '#' starts a comment. Unknown keys are errors.
WorldConfig parse_config(std::string_view text);
std::string print_config(const WorldConfig& config);
void validate_config(const WorldConfig& config);

// Segment between the two cell centers against obstacle squares. Squares are
// closed on their lower edge (larger row) and open on the upper edge, so a
// segment grazing a single corner is blocked only at the two bottom corners.
bool line_of_sight(const GridWorld& g, const VisionConfig& v, Loc from, Loc to);

// Cells within `radius` 4-connected steps of `from` through free cells.
// `forbidden` cells are excluded as endpoints only. Falls back to {from}.
LocSet reachable_moves(const GridWorld& g, Loc from, int radius, bool allow_stay, const LocSet& forbidden);

SurveillanceGame build_game_structure(const GridWorld& g, const MotionConfig& m, const VisionConfig& v);

// Every label as an agent predicate, and as a target predicate under the name
// "target_<label>".
PredicateTable grid_predicates(const GridWorld& g);

// Map followed by the normalized config; hashed into strategy files.
std::string canonical_text(const GridWorld& g, const WorldConfig& config);

}  // namespace survsynth
