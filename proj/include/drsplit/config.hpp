#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drsplit/problems.hpp"
#include "drsplit/schedule.hpp"
#include "drsplit/solver.hpp"

namespace drsplit {

/// Grid for the sweep subcommand: every (lambda, schedule, seed) combination
/// becomes one cell.
struct SweepGrid {
    std::vector<double> lambdas;
    std::vector<ErrorSchedule> schedules;
    std::vector<std::uint64_t> seeds;

    std::size_t cells() const { return lambdas.size() * schedules.size() * seeds.size(); }
};

/// Names accepted in the config "checks" list (plus "all").
const std::vector<std::string>& known_check_names();

struct RunConfig {
    ProblemInstance problem;
    SolverConfig solver;
    std::vector<std::string> checks;  // expanded, validated names
    std::string output_dir;           // may be empty: resolved by the CLI layer
    bool emit_plots = false;
    std::optional<SweepGrid> sweep;

    /// Fully resolved config (generator problems expanded to inline form,
    /// defaults filled in), written into every run directory.
    nlohmann::json effective() const;
};

/// Parses and validates a config file. Errors carry the offending key.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const nlohmann::json& j);

// JSON (de)serializers shared by the config loader and the effective-config
// writer.
nlohmann::json operator_to_json(const OperatorSpec& op);
OperatorSpec operator_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json schedule_to_json(const ErrorSchedule& s);
ErrorSchedule schedule_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json problem_to_json(const ProblemInstance& p);
nlohmann::json solver_to_json(const SolverConfig& s);

}  // namespace drsplit
