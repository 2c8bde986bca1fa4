#include <doctest.h>

#include <cmath>

#include "drsplit/diagnostics.hpp"
#include "drsplit/errors.hpp"
#include "drsplit/problems.hpp"
#include "drsplit/rng.hpp"

using namespace drsplit;

namespace {

VectorH vec(std::initializer_list<double> entries) {
    VectorH v(static_cast<Eigen::Index>(entries.size()));
    Eigen::Index i = 0;
    for (double e : entries) v[i++] = e;
    return v;
}

SolverConfig exact_config() {
    SolverConfig cfg;
    cfg.schedule = ErrorSchedule::zero();
    cfg.mode = InexactnessMode::Exact;
    cfg.stop_tol = 1e-10;
    cfg.max_iter = 200;
    cfg.seed = 1;
    return cfg;
}

// Dense grid sup oracle for the Fitzpatrick function of the scalar identity:
// sup_y x y* ... over graph pairs (y, y), i.e. sup_y (x + xstar) y - y^2.
double oracle_fitzpatrick_identity(double x, double xstar) {
    double best = -1e300;
    for (int i = -20000; i <= 20000; ++i) {
        const double y = 10.0 * i / 20000.0;
        best = std::max(best, x * y + y * xstar - y * y);
    }
    return best;
}

}  // namespace

TEST_CASE("solution pair validation") {
    const ProblemInstance fixture = affine_1d_fixture();
    CHECK_NOTHROW(validate_solution_pair(fixture.A, fixture.B, {vec({0.5}), vec({-0.5})}));
    CHECK_THROWS_AS(validate_solution_pair(fixture.A, fixture.B, {vec({0}), vec({0})}),
                    UsageError);
}

TEST_CASE("solution residual examples") {
    const ProblemInstance fixture = affine_1d_fixture();
    CHECK(solution_residual(fixture.A, fixture.B, vec({0.5}), vec({-0.5})) <= 1e-15);
    CHECK(solution_residual(fixture.A, fixture.B, vec({0}), vec({0})) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(solution_residual(OperatorSpec::zero(), OperatorSpec::zero(), vec({3}), vec({0})) ==
          0.0);
}

TEST_CASE("descent inequality on the 1-D fixture, first iteration frozen values") {
    const ProblemInstance fixture = affine_1d_fixture();
    SolverConfig cfg = exact_config();
    cfg.max_iter = 1;
    cfg.stop_tol = 1e-300;
    Trace trace = solve(cfg, fixture.A, fixture.B, fixture.x0);
    REQUIRE(trace.iterations() == 1);

    auto reports = check_fejer_descent(trace, fixture.A, fixture.B, *fixture.known_solution);
    REQUIRE(reports.size() == 2);
    const CheckReport& ineq = reports[0];
    CHECK(ineq.name == "fejer_descent");
    CHECK(std::abs(ineq.lhs - 0.5) <= 1e-12);
    CHECK(std::abs(ineq.rhs - 0.375) <= 1e-12);
    CHECK(std::abs(ineq.margin - 0.125) <= 1e-12);
    CHECK(ineq.passed);
    CHECK(reports[1].passed);  // gap equality
}

TEST_CASE("descent inequality: stationary zero operators") {
    SolverConfig cfg = exact_config();
    cfg.max_iter = 5;
    cfg.stop_tol = 1e-300;
    auto zero_op = OperatorSpec::zero();
    Trace trace = solve(cfg, zero_op, zero_op, vec({0.3, -0.2}));
    // trace stops immediately: residuals are exactly zero
    REQUIRE(trace.iterations() >= 1);
    SolutionPair p{vec({0.3, -0.2}), vec({0, 0})};
    for (const CheckReport& r : check_fejer_descent(trace, zero_op, zero_op, p)) {
        if (r.name == "fejer_descent") {
            CHECK(r.lhs == 0.0);
            CHECK(r.rhs == 0.0);
        }
        CHECK(r.passed);
    }
}

TEST_CASE("descent inequality with the converged iterate as solution") {
    const ProblemInstance fixture = affine_1d_fixture();
    SolverConfig cfg = exact_config();
    cfg.stop_tol = 1e-10;
    Trace trace = solve(cfg, fixture.A, fixture.B, fixture.x0);
    REQUIRE(trace.status == SolveStatus::Converged);
    const IterateRecord& last = trace.records.back();
    SolutionPair self{last.x, last.b};  // close enough to pass validation
    for (const CheckReport& r : check_fejer_descent(trace, fixture.A, fixture.B, self)) {
        CHECK(r.passed);
    }
}

TEST_CASE("quasi-Fejer monotone in exact mode, slack bound in random_ball mode") {
    const ProblemInstance fixture = affine_1d_fixture();
    const SolutionPair sol = *fixture.known_solution;

    SolverConfig cfg = exact_config();
    cfg.max_iter = 40;
    cfg.stop_tol = 1e-300;
    Trace trace = solve(cfg, fixture.A, fixture.B, fixture.x0);
    const PairPoint p_sol{sol.x, sol.b, cfg.lambda};
    double prev = lambda_norm(trace.p(0) - p_sol);
    for (const IterateRecord& rec : trace.records) {
        const double cur = lambda_norm(trace.p(rec.k) - p_sol);
        CHECK(cur <= prev * (1.0 + 1e-12) + 1e-15);
        prev = cur;
    }

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SolverConfig noisy = exact_config();
        noisy.mode = InexactnessMode::RandomBall;
        noisy.schedule = ErrorSchedule::geometric(1e-3, 0.5);
        noisy.seed = seed;
        noisy.max_iter = 60;
        noisy.stop_tol = 1e-300;
        Trace t = solve(noisy, fixture.A, fixture.B, fixture.x0);
        for (const CheckReport& r : check_quasi_fejer(t, fixture.A, fixture.B, sol)) {
            CHECK(r.passed);
        }
    }
}

TEST_CASE("starting at the solution keeps distances within the schedule telescope") {
    const ProblemInstance fixture = affine_1d_fixture();
    const SolutionPair sol = *fixture.known_solution;
    SolverConfig cfg;
    cfg.mode = InexactnessMode::AdversarialBoundary;
    cfg.schedule = ErrorSchedule::geometric(1e-2, 0.5);
    cfg.max_iter = 50;
    cfg.stop_tol = 1e-300;
    cfg.seed = 4;
    Trace trace = solve(cfg, fixture.A, fixture.B, sol.x);
    const PairPoint p_sol{sol.x, sol.b, cfg.lambda};
    double telescope = 0.0;
    for (const IterateRecord& rec : trace.records) {
        telescope += rec.alpha + rec.beta;
        const double dist = lambda_norm(trace.p(rec.k) - p_sol);
        CHECK(dist <= telescope + 1e-9 * (1.0 + telescope));
    }
}

TEST_CASE("summability bound") {
    const ProblemInstance fixture = affine_1d_fixture();
    SUBCASE("50 exact iterations leave positive margin") {
        SolverConfig cfg = exact_config();
        cfg.max_iter = 50;
        cfg.stop_tol = 1e-300;
        Trace trace = solve(cfg, fixture.A, fixture.B, fixture.x0);
        REQUIRE(trace.iterations() == 50);
        const CheckReport r =
            check_summability_bound(trace, fixture.A, fixture.B, *fixture.known_solution);
        CHECK(r.passed);
        CHECK(r.margin > 0.0);
    }
    SUBCASE("stationary start gives lhs = 0") {
        SolverConfig cfg = exact_config();
        cfg.max_iter = 10;
        cfg.stop_tol = 1e-300;
        Trace trace = solve(cfg, fixture.A, fixture.B, fixture.known_solution->x);
        const CheckReport r =
            check_summability_bound(trace, fixture.A, fixture.B, *fixture.known_solution);
        CHECK(r.lhs <= 1e-12);
        CHECK(r.passed);
    }
    SUBCASE("feasibility fixtures across seeds in random_ball mode") {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const ProblemInstance p = make_feasibility(2, seed);
            SolverConfig cfg;
            cfg.mode = InexactnessMode::RandomBall;
            cfg.schedule = ErrorSchedule::geometric(1e-3, 0.5);
            cfg.max_iter = 60;
            cfg.stop_tol = 1e-300;
            cfg.seed = seed;
            Trace trace = solve(cfg, p.A, p.B, p.x0);
            const CheckReport r = check_summability_bound(trace, p.A, p.B, *p.known_solution);
            CHECK(r.margin > 0.0);
        }
    }
}

TEST_CASE("Fitzpatrick estimate for the scalar identity") {
    auto identity = OperatorSpec::scaled_identity(1.0);

    SUBCASE("closed form verified by the grid oracle") {
        for (const auto& [x, xstar] : {std::pair{1.0, 1.0}, {1.0, 0.0}, {-0.5, 2.0}}) {
            const double closed = (x + xstar) * (x + xstar) / 4.0;
            CHECK(oracle_fitzpatrick_identity(x, xstar) ==
                  doctest::Approx(closed).epsilon(1e-3));
        }
    }
    SUBCASE("on-graph query recovers the duality product") {
        auto est = fitzpatrick_estimate(identity, vec({1}), vec({1}), 10000, 3);
        CHECK(est.value >= 1.0 - 1e-12);       // query included as a sample
        CHECK(est.value <= 1.0 + 1e-3);        // sup equals the duality product on the graph
    }
    SUBCASE("off-graph query exceeds the duality product") {
        auto est = fitzpatrick_estimate(identity, vec({1}), vec({0}), 10000, 3);
        CHECK(est.value == doctest::Approx(0.25).epsilon(2e-3));
        CHECK(est.value > 0.0);
        CHECK(est.value <= 0.25 + 1e-12);  // sampled sup never exceeds the true sup
    }
    SUBCASE("query at the origin") {
        auto est = fitzpatrick_estimate(identity, vec({0}), vec({0}), 2000, 5);
        CHECK(std::abs(est.value) <= 1e-9);
    }
}

TEST_CASE("Fitzpatrick estimate is monotone in the budget for a fixed seed") {
    auto op = OperatorSpec::subdiff_l1(1.0);
    double prev = -1e300;
    for (const int budget : {1, 10, 100, 1000}) {
        auto est = fitzpatrick_estimate(op, vec({0.4}), vec({0.9}), budget, 77);
        CHECK(est.value >= prev - 1e-15);
        prev = est.value;
    }
}

TEST_CASE("Fitzpatrick estimates dominate the duality product on graph points") {
    Rng rng(31);
    auto box = OperatorSpec::normal_cone_box(vec({-1, 0}), vec({1, 2}));
    for (int trial = 0; trial < 20; ++trial) {
        auto g = resolve(box, 1.0, 2.0 * rng.gaussian(2), 0.0);
        auto est = fitzpatrick_estimate(box, g.x, g.v, 100, trial);
        const double duality = g.x.dot(g.v);
        CHECK(est.value >= duality - 1e-9 * (1.0 + std::abs(duality)));
    }
}

TEST_CASE("graph closure surrogate") {
    SUBCASE("constant sequences at a graph point") {
        auto op = OperatorSpec::scaled_identity(1.0);
        std::vector<std::vector<GraphPair>> seqs(1);
        for (int i = 0; i < 5; ++i) seqs[0].push_back({vec({2}), vec({2})});
        const OperatorSpec ops[] = {op};
        auto result = check_graph_closure(ops, seqs, vec({2}), {vec({2})});
        CHECK(result.hypothesis.lhs == 0.0);
        CHECK(result.conclusion.lhs == 0.0);
        CHECK(result.conclusion.passed);
    }
    SUBCASE("normal cone sequence converging to a boundary normal") {
        auto box = OperatorSpec::normal_cone_box(vec({0}), vec({1}));
        std::vector<std::vector<GraphPair>> seqs(1);
        for (int i = 1; i <= 30; ++i) {
            seqs[0].push_back({vec({1}), vec({0.5 + 1.0 / i})});
        }
        const OperatorSpec ops[] = {box};
        auto result = check_graph_closure(ops, seqs, vec({1}), {vec({0.5})}, 1e-6, 1.0);
        CHECK(result.conclusion.lhs == 0.0);  // the cone is closed
        CHECK(result.conclusion.passed);
    }
    SUBCASE("solver subsequences on the 1-D fixture") {
        const ProblemInstance fixture = affine_1d_fixture();
        SolverConfig cfg = exact_config();
        cfg.stop_tol = 1e-8;
        Trace trace = solve(cfg, fixture.A, fixture.B, fixture.x0);
        REQUIRE(trace.status == SolveStatus::Converged);
        std::vector<std::vector<GraphPair>> seqs(2);
        for (const IterateRecord& r : trace.records) {
            seqs[0].push_back({r.y, r.a});
            seqs[1].push_back({r.x, r.b});
        }
        const IterateRecord& last = trace.records.back();
        const OperatorSpec ops[] = {fixture.A, fixture.B};
        auto result = check_graph_closure(ops, seqs, last.x, {last.a, last.b});
        CHECK(result.conclusion.lhs <= 1e-6);
        CHECK(result.conclusion.passed);
        CHECK(result.hypothesis.passed);
    }
    SUBCASE("length mismatch is a usage error") {
        auto op = OperatorSpec::zero();
        std::vector<std::vector<GraphPair>> seqs(2);
        seqs[0] = {{vec({0}), vec({0})}, {vec({0}), vec({0})}};
        seqs[1] = {{vec({0}), vec({0})}};
        const OperatorSpec ops[] = {op, op};
        CHECK_THROWS_AS(
            check_graph_closure(ops, seqs, vec({0}), {vec({0}), vec({0})}), UsageError);
    }
}

TEST_CASE("membership check flags a corrupted trace") {
    const ProblemInstance fixture = affine_1d_fixture();
    SolverConfig cfg = exact_config();
    cfg.max_iter = 10;
    cfg.stop_tol = 1e-300;
    Trace trace = solve(cfg, fixture.A, fixture.B, fixture.x0);

    bool all_pass = true;
    for (const CheckReport& r : check_membership(trace, fixture.A, fixture.B)) {
        all_pass = all_pass && r.passed;
    }
    CHECK(all_pass);

    trace.records[0].b = -trace.records[0].b;  // flip the sign of b_1
    bool any_fail = false;
    for (const CheckReport& r : check_membership(trace, fixture.A, fixture.B)) {
        any_fail = any_fail || !r.passed;
    }
    CHECK(any_fail);
}

TEST_CASE("inexactness transfer bounds hold in adversarial mode") {
    const ProblemInstance fixture = make_l1_quadratic(4, 9);
    SolverConfig cfg;
    cfg.mode = InexactnessMode::AdversarialBoundary;
    cfg.schedule = ErrorSchedule::geometric(1e-2, 0.9);
    cfg.max_iter = 80;
    cfg.stop_tol = 1e-300;
    cfg.seed = 17;
    Trace trace = solve(cfg, fixture.A, fixture.B, fixture.x0);
    for (const CheckReport& r : check_inexactness(trace)) {
        CHECK(r.passed);
    }
    for (const CheckReport& r : check_companion_identities(trace)) {
        CHECK(r.passed);
    }
}

TEST_CASE("shadow point tracks the solution pair distance") {
    const ProblemInstance fixture = affine_1d_fixture();
    SolverConfig cfg = exact_config();
    Trace trace = solve(cfg, fixture.A, fixture.B, fixture.x0);
    REQUIRE(trace.status == SolveStatus::Converged);
    const CheckReport r = check_shadow(trace, *fixture.known_solution);
    CHECK(r.passed);
    // converged run: the shadow point is near x + lambda b
    const IterateRecord& last = trace.records.back();
    const VectorH z_limit = fixture.known_solution->x + cfg.lambda * fixture.known_solution->b;
    CHECK((last.shadow_z - z_limit).norm() <= 1e-8);
}
