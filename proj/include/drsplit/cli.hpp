#pragma once

#include <functional>
#include <optional>
#include <string>

#include "drsplit/config.hpp"
#include "drsplit/solver.hpp"

namespace drsplit {

/// Name of the environment variable giving the default output root for
/// relative output directories.
inline constexpr const char* kOutputRootEnv = "DRSPLIT_OUTPUT_ROOT";

struct CliOptions {
    std::optional<std::string> output_dir;  // --output-dir override
};

/// Final output directory: CLI override, else the config value (prefixed by
/// the output-root env var when relative), else "<config stem>_out".
std::string resolve_output_dir(const RunConfig& config, const CliOptions& options,
                               const std::string& config_path);

// Exit-code contract: 0 converged / all checks passed, 1 error, 2 budget
// exhausted, 3 failed checks.
int cmd_solve(const std::string& config_path, const CliOptions& options = {});
int cmd_verify(const std::string& config_path, const CliOptions& options = {});
int cmd_sweep(const std::string& config_path, const CliOptions& options = {});

// Test seams: run on an already loaded config; the verify hook (if any)
// mutates the trace between the solve and the checks.
int run_solve(const RunConfig& config, const std::string& output_dir);
int run_verify(const RunConfig& config, const std::string& output_dir,
               const std::function<void(Trace&)>& mutate_trace = {});
int run_sweep(const RunConfig& config, const std::string& output_dir);

}  // namespace drsplit
