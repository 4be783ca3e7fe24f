#pragma once

#include <filesystem>
#include <ostream>

namespace relax {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // validation failed, ladder not monotone, invalid system refused
inline constexpr int kExitBadInput = 2;     // usage, config or precondition errors
inline constexpr int kExitSolverError = 3;

struct CliOptions {
  std::filesystem::path out = "out";
  bool allow_invalid = false;
  int threads = 1;
};

int cmd_validate(const std::filesystem::path& config, const CliOptions& opts, std::ostream& log);
int cmd_run(const std::filesystem::path& config, const CliOptions& opts, std::ostream& log);
int cmd_converge(const std::filesystem::path& config, const CliOptions& opts, std::ostream& log);

/// `relaxbench validate|run|converge <config> [--out DIR] [--allow-invalid] [--threads N]`.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace relax
