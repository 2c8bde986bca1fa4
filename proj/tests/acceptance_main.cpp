// Acceptance suite: one self-contained scenario per numbered criterion,
// each printing a single PASS/FAIL line. Exit code is the number of
// failing criteria.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "drsplit/cli.hpp"
#include "drsplit/diagnostics.hpp"
#include "drsplit/problems.hpp"
#include "drsplit/rng.hpp"
#include "drsplit/solver.hpp"

using namespace drsplit;
namespace fs = std::filesystem;

namespace {

struct Failure {
    std::string detail;
};

using CriterionBody = std::function<bool(std::string&)>;

std::vector<ProblemInstance> fixtures_with_known_solution() {
    std::vector<ProblemInstance> out;
    for (const Eigen::Index n : {1, 2, 10, 100}) {
        out.push_back(make_affine_pair(n, 100 + static_cast<std::uint64_t>(n)));
    }
    for (const Eigen::Index n : {1, 3, 10}) {
        out.push_back(make_feasibility(n, 200 + static_cast<std::uint64_t>(n)));
    }
    for (const Eigen::Index n : {1, 10}) {
        out.push_back(make_l1_quadratic(n, 300 + static_cast<std::uint64_t>(n)));
    }
    return out;
}

SolverConfig exact_config(double lambda, int max_iter, double stop_tol) {
    SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.schedule = ErrorSchedule::zero();
    cfg.mode = InexactnessMode::Exact;
    cfg.max_iter = max_iter;
    cfg.stop_tol = stop_tol;
    cfg.seed = 1;
    return cfg;
}

bool all_passed(const std::vector<CheckReport>& reports, const std::string& where,
                std::string& detail) {
    for (const CheckReport& r : reports) {
        if (!r.passed) {
            std::ostringstream ss;
            ss << where << ": " << r.name << " k=" << r.k << " lhs=" << r.lhs
               << " rhs=" << r.rhs << " margin=" << r.margin;
            detail = ss.str();
            return false;
        }
    }
    return true;
}

// --- criterion 1: companion identities on every fixture and lambda ---------

bool criterion_identities(std::string& detail) {
    for (const ProblemInstance& prob : fixtures_with_known_solution()) {
        for (const double lambda : {0.1, 1.0, 10.0}) {
            SolverConfig cfg = exact_config(lambda, 150, 1e-12);
            const Trace trace = solve(cfg, prob.A, prob.B, prob.x0);
            if (trace.status == SolveStatus::Failed) {
                detail = prob.name + ": " + trace.message;
                return false;
            }
            if (!all_passed(check_companion_identities(trace),
                            prob.name + " lambda=" + std::to_string(lambda), detail)) {
                return false;
            }
        }
    }
    return true;
}

// --- criterion 2: inexactness bounds over 100 seeded runs -------------------

bool criterion_inexactness(std::string& detail) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        ProblemInstance prob;
        switch (seed % 3) {
            case 0: prob = make_affine_pair(2, seed); break;
            case 1: prob = make_feasibility(3, seed); break;
            default: prob = make_l1_quadratic(4, seed); break;
        }
        for (const InexactnessMode mode :
             {InexactnessMode::RandomBall, InexactnessMode::AdversarialBoundary}) {
            SolverConfig cfg;
            cfg.schedule = ErrorSchedule::geometric(1e-2, 0.9);
            cfg.mode = mode;
            cfg.max_iter = 200;
            cfg.stop_tol = 1e-300;  // run the full 200 iterations
            cfg.seed = seed;
            const Trace trace = solve(cfg, prob.A, prob.B, prob.x0);
            if (trace.status == SolveStatus::Failed) {
                detail = prob.name + ": " + trace.message;
                return false;
            }
            if (trace.iterations() != 200) {
                detail = prob.name + ": expected 200 iterations, got " +
                         std::to_string(trace.iterations());
                return false;
            }
            if (!all_passed(check_inexactness(trace),
                            prob.name + " seed=" + std::to_string(seed) + " mode=" +
                                to_string(mode),
                            detail)) {
                return false;
            }
        }
    }
    return true;
}

// --- criterion 3: descent inequality, plus the frozen 1-D values ------------

bool criterion_descent(std::string& detail) {
    for (const ProblemInstance& prob : fixtures_with_known_solution()) {
        for (const InexactnessMode mode :
             {InexactnessMode::Exact, InexactnessMode::RandomBall,
              InexactnessMode::AdversarialBoundary}) {
            SolverConfig cfg;
            cfg.schedule = ErrorSchedule::geometric(1e-3, 0.5);
            cfg.mode = mode;
            cfg.max_iter = 120;
            cfg.stop_tol = 1e-300;
            cfg.seed = 5;
            const Trace trace = solve(cfg, prob.A, prob.B, prob.x0);
            if (trace.status == SolveStatus::Failed) {
                detail = prob.name + ": " + trace.message;
                return false;
            }
            if (!all_passed(
                    check_fejer_descent(trace, prob.A, prob.B, *prob.known_solution),
                    prob.name + " mode=" + to_string(mode), detail)) {
                return false;
            }
        }
    }

    // Hand-derived first iteration of the 1-D fixture.
    const ProblemInstance fixture = affine_1d_fixture();
    SolverConfig cfg = exact_config(1.0, 1, 1e-300);
    const Trace trace = solve(cfg, fixture.A, fixture.B, fixture.x0);
    const auto reports =
        check_fejer_descent(trace, fixture.A, fixture.B, *fixture.known_solution);
    if (reports.empty() || std::abs(reports[0].lhs - 0.5) > 1e-12 ||
        std::abs(reports[0].rhs - 0.375) > 1e-12) {
        detail = "frozen 1-D values: expected lhs 0.5, rhs 0.375; got lhs " +
                 std::to_string(reports.empty() ? -1.0 : reports[0].lhs) + ", rhs " +
                 std::to_string(reports.empty() ? -1.0 : reports[0].rhs);
        return false;
    }
    return true;
}

// --- criterion 4: quasi-Fejer monotonicity ----------------------------------

bool criterion_quasi_fejer(std::string& detail) {
    for (const ProblemInstance& prob : fixtures_with_known_solution()) {
        const PairPoint sol{prob.known_solution->x, prob.known_solution->b, 1.0};

        SolverConfig cfg = exact_config(1.0, 150, 1e-300);
        const Trace trace = solve(cfg, prob.A, prob.B, prob.x0);
        if (trace.status == SolveStatus::Failed) {
            detail = prob.name + ": " + trace.message;
            return false;
        }
        double prev = lambda_norm(trace.p(0) - sol);
        for (const IterateRecord& rec : trace.records) {
            const double cur = lambda_norm(trace.p(rec.k) - sol);
            const double slack = 1e-12 * (1.0 + prev + cur);
            if (cur > prev + slack) {
                detail = prob.name + ": distance increased at k=" + std::to_string(rec.k);
                return false;
            }
            prev = cur;
        }

        for (const InexactnessMode mode :
             {InexactnessMode::RandomBall, InexactnessMode::AdversarialBoundary}) {
            SolverConfig noisy;
            noisy.schedule = ErrorSchedule::geometric(1e-3, 0.5);
            noisy.mode = mode;
            noisy.max_iter = 120;
            noisy.stop_tol = 1e-300;
            noisy.seed = 11;
            const Trace t = solve(noisy, prob.A, prob.B, prob.x0);
            if (!all_passed(check_quasi_fejer(t, prob.A, prob.B, *prob.known_solution),
                            prob.name + " mode=" + to_string(mode), detail)) {
                return false;
            }
        }
    }
    return true;
}

// --- criterion 5: summability bound over 20 seeds ---------------------------

bool criterion_summability(std::string& detail) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ProblemInstance probs[] = {
            make_affine_pair(3, 400 + seed),
            make_feasibility(2, 500 + seed),
            make_l1_quadratic(3, 600 + seed),
        };
        for (const ProblemInstance& prob : probs) {
            SolverConfig cfg;
            cfg.schedule = ErrorSchedule::geometric(1e-3, 0.5);
            cfg.mode = InexactnessMode::RandomBall;
            cfg.max_iter = 60;
            cfg.stop_tol = 1e-300;
            cfg.seed = seed;
            const Trace trace = solve(cfg, prob.A, prob.B, prob.x0);
            if (trace.iterations() < 50) {
                detail = prob.name + ": trace shorter than 50 iterations";
                return false;
            }
            const CheckReport r =
                check_summability_bound(trace, prob.A, prob.B, *prob.known_solution);
            if (!(r.margin > 0.0)) {
                detail = prob.name + " seed=" + std::to_string(seed) +
                         ": summability margin " + std::to_string(r.margin);
                return false;
            }
        }
    }
    return true;
}

// --- criterion 6: end-to-end convergence ------------------------------------

bool criterion_convergence(std::string& detail) {
    for (const ProblemInstance& prob : fixtures_with_known_solution()) {
        struct ModeSpec {
            InexactnessMode mode;
            ErrorSchedule schedule;
            int max_iter;
        };
        const ModeSpec modes[] = {
            {InexactnessMode::Exact, ErrorSchedule::zero(), 5000},
            {InexactnessMode::RandomBall, ErrorSchedule::geometric(1e-3, 0.5), 20000},
        };
        for (const ModeSpec& spec : modes) {
            SolverConfig cfg;
            cfg.lambda = 1.0;
            cfg.schedule = spec.schedule;
            cfg.mode = spec.mode;
            cfg.max_iter = spec.max_iter;
            cfg.stop_tol = 1e-7;
            cfg.seed = 2;
            const Trace trace = solve(cfg, prob.A, prob.B, prob.x0);
            if (trace.status != SolveStatus::Converged) {
                detail = prob.name + " mode=" + to_string(spec.mode) + ": status " +
                         to_string(trace.status);
                return false;
            }
            const IterateRecord& last = trace.records.back();
            if (last.res_primal > 1e-6 || last.res_dual > 1e-6) {
                detail = prob.name + ": final residuals " + std::to_string(last.res_primal) +
                         ", " + std::to_string(last.res_dual);
                return false;
            }
            const double sol_res = solution_residual(prob.A, prob.B, last.x, last.b);
            if (sol_res > 1e-5) {
                detail = prob.name + " mode=" + to_string(spec.mode) +
                         ": solution residual " + std::to_string(sol_res);
                return false;
            }
        }
    }

    // The 1-D fixture converges to (0.5, -0.5) within 1e-8 in <= 60 iterations.
    const ProblemInstance fixture = affine_1d_fixture();
    SolverConfig cfg = exact_config(1.0, 60, 1e-9);
    const Trace trace = solve(cfg, fixture.A, fixture.B, fixture.x0);
    if (trace.status != SolveStatus::Converged) {
        detail = "1-D fixture did not converge within 60 iterations";
        return false;
    }
    const IterateRecord& last = trace.records.back();
    if (std::abs(last.x[0] - 0.5) > 1e-8 || std::abs(last.b[0] + 0.5) > 1e-8) {
        detail = "1-D fixture limit (" + std::to_string(last.x[0]) + ", " +
                 std::to_string(last.b[0]) + ")";
        return false;
    }
    return true;
}

// --- criterion 7: Fitzpatrick estimates -------------------------------------

bool criterion_fitzpatrick(std::string& detail) {
    const auto identity = OperatorSpec::scaled_identity(1.0);
    Rng rng(777);
    for (int query = 0; query < 20; ++query) {
        VectorH x(1), xstar(1);
        x[0] = rng.uniform(-2, 2);
        xstar[0] = rng.uniform(-2, 2);
        const double closed_form = (x[0] + xstar[0]) * (x[0] + xstar[0]) / 4.0;
        const auto est = fitzpatrick_estimate(identity, x, xstar, 10000, 1000 + query);
        if (std::abs(est.value - closed_form) > 1e-3) {
            detail = "identity query (" + std::to_string(x[0]) + ", " +
                     std::to_string(xstar[0]) + "): estimate " + std::to_string(est.value) +
                     " vs closed form " + std::to_string(closed_form);
            return false;
        }
    }

    // Every operator kind: on-graph estimates dominate the duality product.
    Eigen::MatrixXd m(3, 3);
    m << 2, 1, 0, -1, 2, 0.5, 0, -0.5, 1;
    Eigen::MatrixXd q_mat(3, 3);
    q_mat << 2, 0.3, 0, 0.3, 1, 0, 0, 0, 0.5;
    Eigen::MatrixXd c_mat(1, 3);
    c_mat << 1, 1, 1;
    VectorH ones = VectorH::Ones(3);
    const std::vector<OperatorSpec> kinds = {
        OperatorSpec::affine_monotone(m, 0.1 * ones),
        OperatorSpec::subdiff_l1(0.7),
        OperatorSpec::normal_cone_box(-ones, ones),
        OperatorSpec::normal_cone_halfspace(VectorH::Ones(3), 0.5),
        OperatorSpec::normal_cone_affine(c_mat, VectorH::Ones(1)),
        OperatorSpec::quadratic_gradient(q_mat, 0.5 * ones),
        OperatorSpec::scaled_identity(1.3),
        OperatorSpec::zero(),
        OperatorSpec::sum_shift(OperatorSpec::subdiff_l1(0.5), 0.2 * ones),
    };
    Rng qrng(4242);
    for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
        for (int t = 0; t < 100; ++t) {
            const GraphPair g = resolve(kinds[ki], 1.0, 2.0 * qrng.gaussian(3), 0.0);
            const auto est = fitzpatrick_estimate(kinds[ki], g.x, g.v, 200, 50 + t);
            const double duality = g.x.dot(g.v);
            if (est.value < duality - 1e-9 * (1.0 + std::abs(duality))) {
                detail = std::string("kind ") + to_string(kinds[ki].kind()) +
                         ": estimate " + std::to_string(est.value) +
                         " below duality product " + std::to_string(duality);
                return false;
            }
        }
    }
    return true;
}

// --- criterion 8: graph-closure surrogate -----------------------------------

bool criterion_graph_closure(std::string& detail) {
    const ProblemInstance probs[] = {affine_1d_fixture(), make_affine_pair(10, 110)};
    for (const ProblemInstance& prob : probs) {
        SolverConfig cfg = exact_config(1.0, 5000, 1e-8);
        const Trace trace = solve(cfg, prob.A, prob.B, prob.x0);
        if (trace.status != SolveStatus::Converged) {
            detail = prob.name + ": did not reach stop_tol 1e-8";
            return false;
        }
        std::vector<std::vector<GraphPair>> seqs(2);
        for (const IterateRecord& r : trace.records) {
            seqs[0].push_back({r.y, r.a});
            seqs[1].push_back({r.x, r.b});
        }
        const IterateRecord& last = trace.records.back();
        const OperatorSpec ops[] = {prob.A, prob.B};
        const auto result =
            check_graph_closure(ops, seqs, last.x, {last.a, last.b}, 1e-6, 1e-3);
        if (!result.conclusion.passed || result.conclusion.lhs > 1e-6) {
            detail = prob.name + ": conclusion residual " +
                     std::to_string(result.conclusion.lhs);
            return false;
        }
    }
    return true;
}

// --- criterion 9: byte-identical traces -------------------------------------

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool criterion_reproducibility(std::string& detail) {
    const fs::path base =
        fs::temp_directory_path() / ("drsplit_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(base);

    RunConfig config;
    config.problem = make_affine_pair(4, 9);
    config.solver.schedule = ErrorSchedule::geometric(1e-3, 0.5);
    config.solver.mode = InexactnessMode::RandomBall;
    config.solver.max_iter = 80;
    config.solver.stop_tol = 1e-10;
    config.solver.seed = 31337;
    config.checks = {};

    const int rc1 = run_solve(config, (base / "r1").string());
    const int rc2 = run_solve(config, (base / "r2").string());
    const std::string t1 = read_file(base / "r1" / "trace.csv");
    const std::string t2 = read_file(base / "r2" / "trace.csv");
    std::error_code ec;
    fs::remove_all(base, ec);
    if (rc1 != rc2) {
        detail = "exit codes differ: " + std::to_string(rc1) + " vs " + std::to_string(rc2);
        return false;
    }
    if (t1.empty() || t1 != t2) {
        detail = "trace.csv bytes differ between identical runs";
        return false;
    }
    return true;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* label;
        CriterionBody body;
    };
    const std::vector<Criterion> criteria = {
        {1, "companion identities on every fixture, lambda in {0.1, 1, 10}",
         criterion_identities},
        {2, "inexactness bounds over 100 seeded runs x 200 iterations",
         criterion_inexactness},
        {3, "descent inequality on every fixture (frozen 1-D first iteration)",
         criterion_descent},
        {4, "quasi-Fejer monotonicity (exact) and slack bound (inexact)",
         criterion_quasi_fejer},
        {5, "summability bound positive over 20 seeds, traces >= 50 iterations",
         criterion_summability},
        {6, "end-to-end convergence on every fixture with a known solution",
         criterion_convergence},
        {7, "Fitzpatrick estimates: identity closed form and duality lower bound",
         criterion_fitzpatrick},
        {8, "graph-closure surrogate on the 1-D and n=10 affine fixtures",
         criterion_graph_closure},
        {9, "byte-identical traces for identical config and seed",
         criterion_reproducibility},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  [%d] %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", c.id, c.label,
                    seconds, detail.empty() ? "" : " -- ", detail.c_str());
        if (!ok) ++failures;
    }
    if (failures == 0) {
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
