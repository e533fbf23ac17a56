#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "survsynth/abstraction.hpp"
#include "survsynth/game_structure.hpp"
#include "survsynth/gridworld.hpp"
#include "survsynth/objective.hpp"
#include "survsynth/solver.hpp"

namespace survsynth {

// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

// Agent controller restricted to the abstract states it can reach. Moves are
// keyed by (state, memory, choice), where choice is the position of the target's
// choice in abstract_successors order; the reply is the agent's next location.
struct Strategy {
    struct Move {
        std::uint32_t state;
        std::uint32_t memory;
        std::uint32_t choice;
        Loc reply;
        std::uint32_t next_memory;
    };

    std::string digest;  // fnv1a_hex(canonical_text(map, config))
    std::string objective;
    Partition partition;
    std::size_t memory_count = 1;
    std::vector<AbstractState> states;  // canonical order
    std::uint32_t initial = 0;
    std::vector<Move> moves;  // sorted by (state, memory, choice)

    std::optional<std::uint32_t> find(const AbstractState& s) const;
    const Move* move(std::uint32_t state, std::uint32_t memory, std::uint32_t choice) const;
};

// Projects a solver strategy onto the states reachable from the initial node
// under it.
Strategy make_strategy(const SurveillanceGame& g, const AbstractGame& game, const AgentStrategy& as,
                       std::string digest, std::string objective);

std::string strategy_to_json(const Strategy& s);
// Throws ParseError on malformed files.
Strategy strategy_from_json(std::string_view text);

struct TargetPolicy {
    enum class Kind { random, scripted, adversarial, goal_seeking };
    Kind kind = Kind::random;
    std::vector<Loc> script;  // scripted: target cell per step
    Loc goal = 0;             // goal_seeking

    static TargetPolicy parse(std::string_view name);
};

std::string policy_name(TargetPolicy::Kind k);

struct TraceStep {
    std::size_t step = 0;
    Loc agent = 0;
    Loc target = 0;
    bool visible = true;  // the target's last move was seen
    LocSet belief;        // exact belief, replayed
    AbstractState abstract;
    std::uint32_t memory = 0;
    std::vector<std::pair<std::string, bool>> atoms;  // objective atoms on the exact belief
};

using Trace = std::vector<TraceStep>;

// Runs `steps` steps (the first is the initial state). Throws Error if a
// scripted move is illegal or runs out, and std::logic_error if the replay
// leaves the strategy or breaks a belief invariant.
Trace simulate(const SurveillanceGame& g, const PredicateTable& preds, const Objective& o, const Strategy& s,
               const TargetPolicy& policy, std::size_t steps, std::uint64_t seed);

// One JSON object per line. Parsing restores the abstract belief's cells and
// block indices, enough for rendering.
std::string trace_to_jsonl(const Trace& t);
Trace trace_from_jsonl(std::string_view text, std::size_t universe);

enum class RenderFormat { text, svg };

// Text glyphs: '#' obstacle, 'A' agent, '*' target when visible, '?' cell of
// the exact belief, '+' cell only in the abstract belief, 'G' goal, '.' free.
std::string render_step(const TraceStep& s, const GridWorld& g, RenderFormat f);
std::vector<std::string> render_trace(const Trace& t, const GridWorld& g, RenderFormat f);
// frame_0000.txt (or .svg) per step. Throws Error if the directory is unusable.
void write_frames(const Trace& t, const GridWorld& g, RenderFormat f, const std::filesystem::path& dir);

}  // namespace survsynth
