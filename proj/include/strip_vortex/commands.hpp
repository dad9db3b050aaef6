#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "strip_vortex/checks.hpp"
#include "strip_vortex/run_config.hpp"

namespace strip_vortex {

using LogSink = std::function<void(const std::string&)>;

/// Everything a subcommand needs: the parsed configuration, the output directory and a log sink.
struct CommandContext {
    RunConfig config;
    std::filesystem::path out_dir;
    LogSink log;  // may be empty
};

/// Subcommands return the process exit status on completion; numerical and I/O failures
/// propagate as strip_vortex::Error.
int run_green(const CommandContext& ctx);
int run_landscape(const CommandContext& ctx);
int run_solve(const CommandContext& ctx);
int run_sweep(const CommandContext& ctx);
/// Writes checks.json and returns 0 only if every criterion passes.
int run_checks_command(const CommandContext& ctx, const CriterionCallback& on_result = {});

const std::vector<std::string>& subcommand_names();
/// Dispatch by name. Throws ErrorKind::Configuration for an unknown subcommand.
int run_subcommand(const std::string& name, const CommandContext& ctx);

/// Canonical JSON text of a checks report: sorted keys, two-space indent, trailing newline.
std::string checks_report_json(const ChecksReport& report);

/// Output directory precedence: command line, then the environment variable, then the config.
std::filesystem::path resolve_output_dir(const std::string& cli_value, const RunConfig& config);

inline constexpr const char* kOutputDirEnv = "STRIP_VORTEX_OUT";

}  // namespace strip_vortex
