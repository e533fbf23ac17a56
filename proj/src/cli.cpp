#include "survsynth/cli.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "survsynth/abstraction.hpp"
#include "survsynth/belief.hpp"
#include "survsynth/cegar.hpp"
#include "survsynth/errors.hpp"
#include "survsynth/gridworld.hpp"
#include "survsynth/objective.hpp"
#include "survsynth/solver.hpp"
#include "survsynth/strategy.hpp"

namespace survsynth::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) throw Error("cannot write " + p.string());
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
}

struct World {
    GridWorld grid;
    WorldConfig config;
    SurveillanceGame game;
    PredicateTable preds;
    std::string digest;
};

World load_world(const RunConfig& cfg) {
    if (cfg.map.empty()) throw Error("--map is required");
    GridWorld grid = parse_grid(slurp(cfg.map));
    WorldConfig config = cfg.config.empty() ? WorldConfig{} : parse_config(slurp(cfg.config));
    SurveillanceGame game = build_game_structure(grid, config.motion, config.vision);
    PredicateTable preds = grid_predicates(grid);
    std::string digest = fnv1a_hex(canonical_text(grid, config));
    return World{std::move(grid), config, std::move(game), std::move(preds), std::move(digest)};
}

// A spec names a readable file, or is the formula itself. Lines starting with
// '#' in spec files are comments.
Objective load_spec(const std::string& spec) {
    if (spec.empty()) throw Error("--spec is required");
    std::error_code ec;
    if (!fs::is_regular_file(spec, ec)) return parse_spec(spec);
    std::istringstream in(slurp(spec));
    std::string text, line;
    while (std::getline(in, line))
        if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] != '#')
            text += line + "\n";
    return parse_spec(text);
}

Partition load_partition(const RunConfig& cfg, const World& w, const Objective& o) {
    if (cfg.partition.empty()) return initial_partition(w.game, w.preds, task_names(o));
    return parse_partition(slurp(cfg.partition), w.game.target_locations());
}

std::vector<Loc> parse_cells(const std::string& text) {
    std::vector<Loc> cells;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        std::string item = text.substr(pos, end - pos);
        Loc v = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || p != item.data() + item.size() || item.empty())
            throw Error("bad cell '" + item + "' in --script");
        cells.push_back(v);
        pos = end + 1;
    }
    return cells;
}

const char* verdict_name(CegarOutcome::Verdict v) {
    switch (v) {
        case CegarOutcome::Verdict::realizable: return "realizable";
        case CegarOutcome::Verdict::unrealizable: return "unrealizable";
        case CegarOutcome::Verdict::budget_exceeded: return "budget-exceeded";
    }
    return "?";
}

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const ParseError& e) {
        err << "error: " << e.what();
        if (e.line() > 0) err << " at line " << e.line() << ", column " << e.column();
        err << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const World w = load_world(cfg);
        const Objective o = load_spec(cfg.spec);
        const Partition q = load_partition(cfg, w, o);
        CegarOptions opts;
        if (cfg.max_states) opts.max_states = cfg.max_states;
        opts.max_iters = cfg.max_iters;
        CegarOutcome res = cegar_loop(w.game, w.preds, o, q, opts);

        std::string transcript;
        for (const std::string& line : res.transcript) transcript += line + "\n";
        out << transcript;
        const std::string verdict = std::string("verdict=") + verdict_name(res.verdict) +
                                    " iterations=" + std::to_string(res.iterations) +
                                    " blocks=" + std::to_string(res.partition.size()) + "\n";
        out << verdict;
        if (cfg.dump_partition) out << dump_partition(res.partition);
        if (!res.budget_message.empty()) err << "budget: " << res.budget_message << "\n";

        if (!cfg.out.empty()) {
            ensure_dir(cfg.out);
            spill(cfg.out / "verdict.txt", verdict);
            spill(cfg.out / "transcript.txt", transcript);
            spill(cfg.out / "partition.txt", dump_partition(res.partition));
            if (res.strategy)
                spill(cfg.out / "strategy.json",
                      strategy_to_json(make_strategy(w.game, *res.game, *res.strategy, w.digest, print_spec(o))));
            if (res.verdict == CegarOutcome::Verdict::unrealizable)
                spill(cfg.out / "counterexample.txt", res.counterexample);
        }
        switch (res.verdict) {
            case CegarOutcome::Verdict::realizable: return kExitOk;
            case CegarOutcome::Verdict::unrealizable: return kExitUnrealizable;
            case CegarOutcome::Verdict::budget_exceeded: return kExitBudget;
        }
        return kExitUsage;
    });
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const World w = load_world(cfg);
        const Objective o = load_spec(cfg.spec);
        check_objective(w.game, w.preds, o);
        const BeliefGame bg = build_belief_game(w.game, cfg.max_states ? cfg.max_states : kDefaultOracleStates);
        const WinningCondition cond = make_condition(o, bg.states.size(), [&](const Atom& a, NodeId n) {
            return eval_atom(w.game, w.preds, a, bg.states[n].agent, bg.states[n].belief);
        });
        const SolveResult res = solve(bg.arena, cond);
        out << "verdict=" << (res.agent_wins ? "realizable" : "unrealizable") << " states=" << bg.states.size()
            << " winning=" << res.winning.size() << "\n";
        return res.agent_wins ? kExitOk : kExitUnrealizable;
    });
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const World w = load_world(cfg);
        if (cfg.strategy.empty()) throw Error("--strategy is required");
        const Strategy s = strategy_from_json(slurp(cfg.strategy));
        if (s.digest != w.digest)
            throw Error("strategy was synthesized for a different map or config (digest " + s.digest + ", expected " +
                        w.digest + ")");
        const Objective o = parse_spec(s.objective);
        TargetPolicy policy = TargetPolicy::parse(cfg.policy);
        if (policy.kind == TargetPolicy::Kind::scripted) policy.script = parse_cells(cfg.script);
        if (policy.kind == TargetPolicy::Kind::goal_seeking) {
            if (cfg.goal >= 0) {
                policy.goal = static_cast<Loc>(cfg.goal);
            } else if (!w.grid.goal_cells.empty()) {
                policy.goal = w.grid.goal_cells.first();
            } else {
                throw Error("goal-seeking policy needs --goal or a 'G' cell");
            }
            if (!w.game.target_locations().contains(policy.goal)) throw Error("--goal is not a target location");
        }
        const Trace t = simulate(w.game, w.preds, o, s, policy, cfg.steps, cfg.seed);
        const std::string text = trace_to_jsonl(t);
        if (cfg.out.empty()) {
            out << text;
        } else {
            spill(cfg.out, text);
            out << "steps=" << t.size() << " trace=" << cfg.out.string() << "\n";
        }
        return kExitOk;
    });
}

int cmd_render(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const World w = load_world(cfg);
        if (cfg.trace.empty()) throw Error("--trace is required");
        if (cfg.out.empty()) throw Error("--out is required");
        RenderFormat f;
        if (cfg.format == "text") f = RenderFormat::text;
        else if (cfg.format == "svg") f = RenderFormat::svg;
        else throw Error("unknown format '" + cfg.format + "'");
        const Trace t = trace_from_jsonl(slurp(cfg.trace), w.grid.size());
        write_frames(t, w.grid, f, cfg.out);
        out << "frames=" << t.size() << " dir=" << cfg.out.string() << "\n";
        return kExitOk;
    });
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const World w = load_world(cfg);
        bool clean = true;
        const SuccessorReport rep = validate_assumptions(w.game);
        out << "reachable_states=" << rep.reachable_states << " total=" << (rep.total ? "yes" : "no")
            << " invisible_independent=" << (rep.invisible_independent ? "yes" : "no") << "\n";
        for (const AssumptionViolation& v : rep.violations) out << "violation: " << v.describe() << "\n";
        clean = clean && rep.ok();
        if (!cfg.spec.empty()) {
            const Objective o = load_spec(cfg.spec);
            try {
                check_objective(w.game, w.preds, o);
                out << "objective: " << print_spec(o) << "\n";
            } catch (const Error& e) {
                out << "objective problem: " << e.what() << "\n";
                clean = false;
            }
            const Partition q = load_partition(cfg, w, o);
            if (auto bad = uniformity_violation(q, w.preds, task_names(o))) {
                out << "partition problem: predicate '" << *bad << "' is not constant on a block\n";
                clean = false;
            } else {
                out << "partition: " << q.size() << " blocks, uniform\n";
            }
        }
        out << (clean ? "clean" : "problems found") << "\n";
        return clean ? kExitOk : kExitUnrealizable;
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Surveillance strategy synthesis by belief abstraction refinement", "survsynth"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto world = [&](CLI::App* sub) {
        sub->add_option("--map", cfg.map, "ASCII grid map")->required();
        sub->add_option("--config", cfg.config, "key=value motion and vision settings");
    };
    auto* synth = app.add_subcommand("synth", "Synthesize a strategy by abstraction refinement");
    world(synth);
    synth->add_option("--spec", cfg.spec, "objective formula, or a file containing it")->required();
    synth->add_option("--out", cfg.out, "artifact directory");
    synth->add_option("--partition", cfg.partition, "initial partition file");
    synth->add_option("--max-states", cfg.max_states, "abstract state budget");
    synth->add_option("--max-iters", cfg.max_iters, "refinement iteration budget");
    synth->add_flag("--dump-partition", cfg.dump_partition, "print the final partition");

    auto* oracle = app.add_subcommand("oracle", "Solve the explicit belief game");
    world(oracle);
    oracle->add_option("--spec", cfg.spec, "objective formula, or a file containing it")->required();
    oracle->add_option("--max-states", cfg.max_states, "belief state budget");

    auto* simulate = app.add_subcommand("simulate", "Run a synthesized strategy against a target policy");
    world(simulate);
    simulate->add_option("--strategy", cfg.strategy, "strategy.json from synth")->required();
    simulate->add_option("--out", cfg.out, "trace file (JSON lines); stdout if omitted");
    simulate->add_option("--seed", cfg.seed, "random seed");
    simulate->add_option("--steps", cfg.steps, "number of steps, including the initial one");
    simulate->add_option("--policy", cfg.policy, "random | scripted | adversarial | goal-seeking");
    simulate->add_option("--script", cfg.script, "comma-separated target cells for the scripted policy");
    simulate->add_option("--goal", cfg.goal, "goal cell for the goal-seeking policy");

    auto* render = app.add_subcommand("render", "Render a trace as text or SVG frames");
    world(render);
    render->add_option("--trace", cfg.trace, "trace file from simulate")->required();
    render->add_option("--out", cfg.out, "frame directory")->required();
    render->add_option("--format", cfg.format, "text | svg");

    auto* validate = app.add_subcommand("validate", "Check the game assumptions, objective and partition");
    world(validate);
    validate->add_option("--spec", cfg.spec, "objective formula, or a file containing it");
    validate->add_option("--partition", cfg.partition, "partition file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (*synth) return cmd_synth(cfg, out, err);
    if (*oracle) return cmd_oracle(cfg, out, err);
    if (*simulate) return cmd_simulate(cfg, out, err);
    if (*render) return cmd_render(cfg, out, err);
    return cmd_validate(cfg, out, err);
}

}  // namespace survsynth::cli
