#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace survsynth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitUnrealizable = 10;  // also: validate found problems
inline constexpr int kExitBudget = 20;

struct RunConfig {
    std::string command;
    std::filesystem::path map;
    std::filesystem::path config;  // empty: defaults
    std::string spec;              // formula text, or a path to a file holding one
    std::filesystem::path out;
    std::filesystem::path partition;
    std::filesystem::path strategy;
    std::filesystem::path trace;
    std::uint64_t seed = 1;
    std::size_t max_states = 0;  // 0: the command's default budget
    std::size_t max_iters = 200;
    bool dump_partition = false;
    std::string format = "text";
    std::string policy = "random";
    std::string script;  // comma-separated target cells
    long goal = -1;      // -1: first 'G' cell
    std::size_t steps = 50;
};

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_render(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Parses argv and dispatches. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace survsynth::cli
