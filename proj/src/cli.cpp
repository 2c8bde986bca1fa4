#include "drsplit/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <vector>

#include "drsplit/diagnostics.hpp"
#include "drsplit/errors.hpp"
#include "drsplit/svg_plot.hpp"
#include "drsplit/trace_io.hpp"

namespace drsplit {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve_output_dir(const RunConfig& config, const CliOptions& options,
                               const std::string& config_path) {
    if (options.output_dir) return *options.output_dir;
    std::string dir = config.output_dir;
    if (dir.empty()) dir = fs::path(config_path).stem().string() + "_out";
    if (fs::path(dir).is_relative()) {
        if (const char* root = std::getenv(kOutputRootEnv); root && *root) {
            return (fs::path(root) / dir).string();
        }
    }
    return dir;
}

namespace {

void write_effective_config(const RunConfig& config, const std::string& output_dir) {
    RunConfig resolved = config;
    resolved.output_dir = output_dir;
    std::ofstream out(fs::path(output_dir) / "effective_config.json");
    out << resolved.effective().dump(2) << '\n';
}

json final_residuals_json(const Trace& trace) {
    if (trace.records.empty()) return json::object();
    const IterateRecord& last = trace.records.back();
    return {{"res_primal", last.res_primal}, {"res_dual", last.res_dual},
            {"res_s1", last.res_s1},         {"res_s2", last.res_s2},
            {"alpha", last.alpha},           {"beta", last.beta}};
}

void emit_plots(const RunConfig& config, const Trace& trace, const fs::path& dir) {
    std::vector<double> primal, dual, dist;
    primal.reserve(trace.records.size());
    for (const IterateRecord& r : trace.records) {
        primal.push_back(r.res_primal);
        dual.push_back(r.res_dual);
        if (config.problem.known_solution) {
            const PairPoint sol{config.problem.known_solution->x,
                                config.problem.known_solution->b, trace.lambda};
            dist.push_back(lambda_norm(trace.p(r.k) - sol));
        }
    }
    write_line_chart_svg((dir / "residuals.svg").string(),
                         "Residuals: " + config.problem.name, "residual",
                         {{"res_primal", primal}, {"res_dual", dual}}, true);
    if (!dist.empty()) {
        write_line_chart_svg((dir / "fejer.svg").string(),
                             "Distance to solution: " + config.problem.name,
                             "|p_k - p| (weighted)", {{"dist_to_solution", dist}}, true);
    }
}

int status_exit_code(const Trace& trace) {
    switch (trace.status) {
        case SolveStatus::Converged: return 0;
        case SolveStatus::MaxIter: return 2;
        case SolveStatus::Failed: return 1;
    }
    return 1;
}

json run_summary(const RunConfig& config, const Trace& trace) {
    json summary{{"problem", config.problem.name},
                 {"status", to_string(trace.status)},
                 {"iterations", trace.iterations()},
                 {"lambda", config.solver.lambda},
                 {"seed", config.solver.seed},
                 {"inexactness_mode", to_string(config.solver.mode)},
                 {"final", final_residuals_json(trace)}};
    if (!trace.message.empty()) summary["error"] = trace.message;
    if (config.problem.known_solution && !trace.records.empty()) {
        const IterateRecord& last = trace.records.back();
        summary["solution_residual"] =
            solution_residual(config.problem.A, config.problem.B, last.x, last.b);
        const PairPoint sol{config.problem.known_solution->x,
                            config.problem.known_solution->b, trace.lambda};
        summary["dist_to_solution"] = lambda_norm(trace.p(last.k) - sol);
    }
    return summary;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

constexpr double kSolutionCheckTol = 1e-5;

}  // namespace

int run_solve(const RunConfig& config, const std::string& output_dir) {
    fs::create_directories(output_dir);
    write_effective_config(config, output_dir);

    const Trace trace =
        solve(config.solver, config.problem.A, config.problem.B, config.problem.x0);
    write_trace_csv((fs::path(output_dir) / "trace.csv").string(), trace,
                    config.problem.known_solution);
    write_json(fs::path(output_dir) / "summary.json", run_summary(config, trace));
    if (config.emit_plots && !trace.records.empty()) {
        emit_plots(config, trace, output_dir);
    }
    if (trace.status == SolveStatus::Failed) {
        std::cerr << "solve failed: " << trace.message << '\n';
    }
    std::cout << config.problem.name << ": " << to_string(trace.status) << " after "
              << trace.iterations() << " iterations\n";
    return status_exit_code(trace);
}

int run_verify(const RunConfig& config, const std::string& output_dir,
               const std::function<void(Trace&)>& mutate_trace) {
    fs::create_directories(output_dir);
    write_effective_config(config, output_dir);

    Trace trace =
        solve(config.solver, config.problem.A, config.problem.B, config.problem.x0);
    if (trace.status == SolveStatus::Failed) {
        std::cerr << "solve failed: " << trace.message << '\n';
        return 1;
    }
    if (mutate_trace) mutate_trace(trace);
    write_trace_csv((fs::path(output_dir) / "trace.csv").string(), trace,
                    config.problem.known_solution);

    const OperatorSpec& a_op = config.problem.A;
    const OperatorSpec& b_op = config.problem.B;
    const auto& solution = config.problem.known_solution;

    std::vector<CheckReport> reports;
    std::vector<std::string> refused;
    auto refuse = [&](const std::string& name, const std::string& why) {
        refused.push_back(name + " (" + why + ")");
        std::cout << "refused: " << name << " - " << why << '\n';
    };

    for (const std::string& name : config.checks) {
        const bool needs_solution = name == "fejer_descent" || name == "quasi_fejer" ||
                                    name == "summability" || name == "shadow" ||
                                    name == "solution_residual" || name == "residuals";
        if (needs_solution && !solution) {
            refuse(name, "no known solution");
            continue;
        }
        SolutionPair sol = solution ? *solution : SolutionPair{};
        auto run_check = [&]() {
            if (name == "membership") {
                auto r = check_membership(trace, a_op, b_op);
                reports.insert(reports.end(), r.begin(), r.end());
            } else if (name == "identities") {
                auto r = check_companion_identities(trace);
                reports.insert(reports.end(), r.begin(), r.end());
            } else if (name == "inexactness") {
                auto r = check_inexactness(trace);
                reports.insert(reports.end(), r.begin(), r.end());
            } else if (name == "fejer_descent") {
                auto r = check_fejer_descent(trace, a_op, b_op, sol);
                reports.insert(reports.end(), r.begin(), r.end());
            } else if (name == "quasi_fejer") {
                auto r = check_quasi_fejer(trace, a_op, b_op, sol);
                reports.insert(reports.end(), r.begin(), r.end());
            } else if (name == "summability") {
                reports.push_back(check_summability_bound(trace, a_op, b_op, sol));
            } else if (name == "residuals") {
                reports.push_back(check_residuals(trace, config.solver.stop_tol));
            } else if (name == "shadow") {
                reports.push_back(check_shadow(trace, sol));
            } else if (name == "solution_residual") {
                const IterateRecord& last = trace.records.back();
                CheckReport r;
                r.name = "solution_residual";
                r.k = last.k;
                r.lhs = solution_residual(a_op, b_op, last.x, last.b);
                r.rhs = kSolutionCheckTol;
                r.margin = r.rhs - r.lhs;
                r.passed = r.margin >= 0.0;
                reports.push_back(r);
            } else if (name == "graph_closure") {
                if (trace.status != SolveStatus::Converged || trace.records.size() < 2) {
                    refuse(name, "run did not converge");
                    return;
                }
                std::vector<std::vector<GraphPair>> seqs(2);
                for (const IterateRecord& r : trace.records) {
                    seqs[0].push_back({r.y, r.a});
                    seqs[1].push_back({r.x, r.b});
                }
                const IterateRecord& last = trace.records.back();
                const OperatorSpec ops[] = {a_op, b_op};
                auto result = check_graph_closure(ops, seqs, last.x, {last.a, last.b});
                reports.push_back(result.hypothesis);
                reports.push_back(result.conclusion);
            }
        };
        try {
            run_check();
        } catch (const std::exception& e) {
            // A check whose own preconditions fail on this trace counts as a
            // detection, not a crash.
            std::cerr << name << " aborted: " << e.what() << '\n';
            CheckReport error_report;
            error_report.name = name + "_error";
            error_report.passed = false;
            reports.push_back(error_report);
        }
    }

    write_checks_csv((fs::path(output_dir) / "checks.csv").string(), reports);

    std::size_t failed = 0;
    for (const CheckReport& r : reports) {
        if (!r.passed) ++failed;
    }
    json summary = run_summary(config, trace);
    summary["checks"] = {{"executed", reports.size()},
                         {"failed", failed},
                         {"refused", refused}};
    write_json(fs::path(output_dir) / "summary.json", summary);

    if (failed > 0) {
        std::vector<const CheckReport*> failures;
        for (const CheckReport& r : reports) {
            if (!r.passed) failures.push_back(&r);
        }
        std::sort(failures.begin(), failures.end(),
                  [](const CheckReport* a, const CheckReport* b) {
                      return a->margin < b->margin;
                  });
        std::cerr << failed << " check(s) failed; worst margins:\n";
        for (std::size_t i = 0; i < failures.size() && i < 10; ++i) {
            std::cerr << "  " << failures[i]->name;
            if (failures[i]->k >= 0) std::cerr << " k=" << failures[i]->k;
            std::cerr << " margin=" << format_g17(failures[i]->margin) << '\n';
        }
        return 3;
    }
    std::cout << reports.size() << " checks passed";
    if (!refused.empty()) std::cout << " (" << refused.size() << " refused)";
    std::cout << '\n';
    return 0;
}

namespace {

std::string schedule_label(const ErrorSchedule& s) {
    auto one = [](const ScheduleSpec& spec) -> std::string {
        switch (spec.kind) {
            case ScheduleSpec::Kind::Geometric:
                return "geometric(" + format_g17(spec.c) + ";" + format_g17(spec.rho) + ")";
            case ScheduleSpec::Kind::Power:
                return "power(" + format_g17(spec.c) + ";" + format_g17(spec.p) + ")";
            case ScheduleSpec::Kind::Zero:
                return "zero";
        }
        return "zero";
    };
    const std::string a = one(s.alpha);
    const std::string b = one(s.beta);
    return a == b ? a : a + "|" + b;
}

}  // namespace

int run_sweep(const RunConfig& config, const std::string& output_dir) {
    if (!config.sweep || config.sweep->cells() == 0) {
        std::cerr << "empty sweep: the grid needs lambda values, schedules and seeds\n";
        return 1;
    }
    fs::create_directories(output_dir);
    write_effective_config(config, output_dir);
    const SweepGrid& grid = *config.sweep;

    std::ofstream csv(fs::path(output_dir) / "sweep.csv", std::ios::binary);
    csv << "lambda,schedule,seed,status,iterations,res_primal,res_dual,solution_residual\n";

    std::size_t converged_cells = 0;
    std::vector<double> heat(grid.schedules.size() * grid.lambdas.size(), 0.0);
    std::vector<std::size_t> heat_count(heat.size(), 0);

    for (std::size_t si = 0; si < grid.schedules.size(); ++si) {
        for (std::size_t li = 0; li < grid.lambdas.size(); ++li) {
            for (const std::uint64_t seed : grid.seeds) {
                SolverConfig cell = config.solver;
                cell.lambda = grid.lambdas[li];
                cell.schedule = grid.schedules[si];
                cell.seed = seed;
                Trace trace;
                try {
                    cell.validate();
                    trace = solve(cell, config.problem.A, config.problem.B,
                                  config.problem.x0);
                } catch (const std::exception& e) {
                    trace.status = SolveStatus::Failed;
                    trace.message = e.what();
                }
                csv << format_g17(cell.lambda) << ',' << schedule_label(cell.schedule) << ','
                    << seed << ',' << to_string(trace.status) << ',' << trace.iterations()
                    << ',';
                if (!trace.records.empty()) {
                    const IterateRecord& last = trace.records.back();
                    csv << format_g17(last.res_primal) << ',' << format_g17(last.res_dual)
                        << ',';
                    if (config.problem.known_solution) {
                        csv << format_g17(solution_residual(config.problem.A,
                                                            config.problem.B, last.x,
                                                            last.b));
                    }
                } else {
                    csv << ",,";
                }
                csv << '\n';
                if (trace.status == SolveStatus::Converged) {
                    ++converged_cells;
                    heat[si * grid.lambdas.size() + li] += trace.iterations();
                    ++heat_count[si * grid.lambdas.size() + li];
                }
            }
        }
    }
    csv.close();

    if (config.emit_plots) {
        std::vector<std::string> cols, rows;
        for (double l : grid.lambdas) cols.push_back("lambda=" + format_g17(l));
        for (const auto& s : grid.schedules) rows.push_back(schedule_label(s));
        for (std::size_t i = 0; i < heat.size(); ++i) {
            heat[i] = heat_count[i] > 0 ? heat[i] / static_cast<double>(heat_count[i])
                                        : std::numeric_limits<double>::quiet_NaN();
        }
        write_heatmap_svg((fs::path(output_dir) / "sweep.svg").string(),
                          "Iterations to tolerance: " + config.problem.name, cols, rows, heat);
    }

    std::cout << "sweep: " << converged_cells << " of " << grid.cells()
              << " cells converged\n";
    return converged_cells > 0 ? 0 : 1;
}

namespace {

int guarded(const std::string& config_path, const CliOptions& options,
            int (*body)(const RunConfig&, const std::string&)) {
    try {
        const RunConfig config = load_run_config(config_path);
        const std::string out_dir = resolve_output_dir(config, options, config_path);
        return body(config, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int cmd_solve(const std::string& config_path, const CliOptions& options) {
    return guarded(config_path, options, [](const RunConfig& c, const std::string& d) {
        return run_solve(c, d);
    });
}

int cmd_verify(const std::string& config_path, const CliOptions& options) {
    return guarded(config_path, options, [](const RunConfig& c, const std::string& d) {
        return run_verify(c, d);
    });
}

int cmd_sweep(const std::string& config_path, const CliOptions& options) {
    return guarded(config_path, options, [](const RunConfig& c, const std::string& d) {
        return run_sweep(c, d);
    });
}

}  // namespace drsplit
