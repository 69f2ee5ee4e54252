// Subcommands of the flamespeed tool.  Each writes its artifacts into ctx.out_dir and returns an exit code.
#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>

#include "flamespeed/config.hpp"

namespace flamespeed {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitSolver = 2,
    kExitSelectionRefused = 3,
    kExitCounterexample = 4,
};

struct CommandContext {
    std::filesystem::path out_dir;
    std::ostream* log = nullptr;    // progress and error messages; null silences them
};

int cmd_solve(const RunConfig& cfg, const CommandContext& ctx);
int cmd_sweep(const RunConfig& cfg, const CommandContext& ctx);
int cmd_inviscid(const RunConfig& cfg, const CommandContext& ctx);
int cmd_select(const RunConfig& cfg, const CommandContext& ctx);
int cmd_verify(const RunConfig& cfg, const CommandContext& ctx);
int cmd_perturb(const RunConfig& cfg, const CommandContext& ctx);
int cmd_hj(const RunConfig& cfg, const CommandContext& ctx);

/// Runs a command and maps escaping exceptions to exit codes.
int run_guarded(const std::function<int(const RunConfig&, const CommandContext&)>& cmd, const RunConfig& cfg,
                const CommandContext& ctx);

}  // namespace flamespeed
