#include "drsplit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drsplit/errors.hpp"
#include "drsplit/rng.hpp"

namespace drsplit {

void validate_solution_pair(const OperatorSpec& a_op, const OperatorSpec& b_op,
                            const SolutionPair& p) {
    const double res_b = membership_residual(b_op, {p.x, p.b});
    const double res_a = membership_residual(a_op, {p.x, -p.b});
    if (res_b > 1e-9 || res_a > 1e-9) {
        throw UsageError("solution pair is not in the extended solution set "
                         "(membership residuals: B " + std::to_string(res_b) +
                         ", A " + std::to_string(res_a) + ")");
    }
}

namespace {

CheckReport ge_report(std::string name, int k, double lhs, double rhs) {
    CheckReport r;
    r.name = std::move(name);
    r.k = k;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = lhs - rhs;  // checks "lhs >= rhs"
    r.tolerance = check_tolerance(lhs, rhs);
    r.passed = r.margin >= -r.tolerance;
    return r;
}

CheckReport le_report(std::string name, int k, double lhs, double rhs) {
    CheckReport r;
    r.name = std::move(name);
    r.k = k;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;  // checks "lhs <= rhs"
    r.tolerance = check_tolerance(lhs, rhs);
    r.passed = r.margin >= -r.tolerance;
    return r;
}

CheckReport eq_report(std::string name, int k, double lhs, double rhs, double tolerance) {
    CheckReport r;
    r.name = std::move(name);
    r.k = k;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = -std::abs(lhs - rhs);
    r.tolerance = tolerance;
    r.passed = r.margin >= -tolerance;
    return r;
}

void require_nonempty(const Trace& trace, const char* where) {
    if (trace.records.empty()) {
        throw UsageError(std::string(where) + ": trace has no iterations");
    }
}

}  // namespace

std::vector<CheckReport> check_membership(const Trace& trace, const OperatorSpec& a_op,
                                          const OperatorSpec& b_op) {
    require_nonempty(trace, "check_membership");
    std::vector<CheckReport> out;
    out.reserve(trace.records.size() * 4);
    for (const IterateRecord& r : trace.records) {
        const double scale_a = 1e-9 * (1.0 + r.y.norm() + r.a.norm());
        const double scale_b = 1e-9 * (1.0 + r.x.norm() + r.b.norm());
        out.push_back(le_report("member_A", r.k, membership_residual(a_op, {r.y, r.a}), scale_a));
        out.push_back(le_report("member_B", r.k, membership_residual(b_op, {r.x, r.b}), scale_b));
        out.push_back(le_report("member_A_companion", r.k,
                                membership_residual(a_op, {r.yhat, r.ahat}), scale_a));
        out.push_back(le_report("member_B_companion", r.k,
                                membership_residual(b_op, {r.xhat, r.bhat}), scale_b));
    }
    return out;
}

std::vector<CheckReport> check_companion_identities(const Trace& trace) {
    require_nonempty(trace, "check_companion_identities");
    const double lambda = trace.lambda;
    std::vector<CheckReport> out;
    out.reserve(trace.records.size() * 3);
    for (const IterateRecord& r : trace.records) {
        const VectorH& x_prev = trace.x_before(r.k);
        const VectorH& b_prev = trace.b_before(r.k);
        const double scale =
            1.0 + x_prev.norm() + r.xhat.norm() + r.yhat.norm() +
            lambda * (r.ahat.norm() + r.bhat.norm() + b_prev.norm());
        const double tol = 1e-10 * scale;
        out.push_back(eq_report(
            "identity_update_x", r.k,
            (x_prev - r.xhat - lambda * (r.ahat + r.bhat)).norm(), 0.0, tol));
        out.push_back(eq_report(
            "identity_update_b", r.k,
            (lambda * (b_prev - r.bhat) - (r.xhat - r.yhat)).norm(), 0.0, tol));
        out.push_back(eq_report(
            "identity_chain", r.k,
            (r.xhat - r.yhat + lambda * (r.ahat + r.bhat) - (x_prev - r.yhat)).norm(), 0.0,
            tol));
    }
    return out;
}

std::vector<CheckReport> check_inexactness(const Trace& trace) {
    require_nonempty(trace, "check_inexactness");
    const double lambda = trace.lambda;
    std::vector<CheckReport> out;
    out.reserve(trace.records.size() * 2);
    for (const IterateRecord& r : trace.records) {
        const double step1 = lambda_norm({r.y - r.yhat, r.a - r.ahat, lambda});
        const double step2 = lambda_norm({r.x - r.xhat, r.b - r.bhat, lambda});
        out.push_back(le_report("inexact_step1", r.k, step1, r.alpha));
        out.push_back(le_report("inexact_step2", r.k, step2, r.alpha + r.beta));
    }
    return out;
}

std::vector<CheckReport> check_fejer_descent(const Trace& trace, const OperatorSpec& a_op,
                                             const OperatorSpec& b_op, const SolutionPair& p) {
    require_nonempty(trace, "check_fejer_descent");
    validate_solution_pair(a_op, b_op, p);
    const double lambda = trace.lambda;
    const PairPoint sol{p.x, p.b, lambda};
    std::vector<CheckReport> out;
    out.reserve(trace.records.size() * 2);
    for (const IterateRecord& r : trace.records) {
        const PairPoint prev = trace.p(r.k - 1);
        const double dist_prev = lambda_norm(prev - sol);
        const double dist_hat = lambda_norm(trace.p_hat(r.k) - sol);
        const double gap = (trace.x_before(r.k) - r.yhat).norm();
        out.push_back(ge_report("fejer_descent", r.k, dist_prev * dist_prev,
                                dist_hat * dist_hat + gap * gap));
        const double gap_dual = lambda * (r.ahat + trace.b_before(r.k)).norm();
        out.push_back(eq_report("fejer_descent_eq", r.k, gap, gap_dual,
                                check_tolerance(gap, gap_dual)));
    }
    return out;
}

std::vector<CheckReport> check_quasi_fejer(const Trace& trace, const OperatorSpec& a_op,
                                           const OperatorSpec& b_op, const SolutionPair& p) {
    require_nonempty(trace, "check_quasi_fejer");
    validate_solution_pair(a_op, b_op, p);
    const double lambda = trace.lambda;
    const PairPoint sol{p.x, p.b, lambda};
    std::vector<CheckReport> out;
    out.reserve(trace.records.size());
    for (const IterateRecord& r : trace.records) {
        const double lhs = lambda_norm(trace.p(r.k) - sol);
        const double rhs = r.alpha + r.beta + lambda_norm(trace.p(r.k - 1) - sol);
        out.push_back(le_report("quasi_fejer", r.k, lhs, rhs));
    }
    return out;
}

CheckReport check_summability_bound(const Trace& trace, const OperatorSpec& a_op,
                                    const OperatorSpec& b_op, const SolutionPair& p) {
    require_nonempty(trace, "check_summability_bound");
    validate_solution_pair(a_op, b_op, p);
    const double lambda = trace.lambda;
    const PairPoint sol{p.x, p.b, lambda};

    double sup_dist = lambda_norm(trace.p(0) - sol);
    for (const IterateRecord& r : trace.records) {
        sup_dist = std::max(sup_dist, lambda_norm(trace.p(r.k) - sol));
    }
    const double m = 1.0 + sup_dist;

    double gap_sq_sum = 0.0;
    double tol_sum = 0.0;
    for (const IterateRecord& r : trace.records) {
        gap_sq_sum += (trace.x_before(r.k) - r.yhat).squaredNorm();
        tol_sum += r.alpha + r.beta;
    }
    const double lhs = gap_sq_sum / (2.0 * m);
    const double rhs = lambda_norm(trace.p(0) - sol) + tol_sum;
    return le_report("summability_bound", -1, lhs, rhs);
}

CheckReport check_residuals(const Trace& trace, double stop_tol) {
    require_nonempty(trace, "check_residuals");
    const IterateRecord& last = trace.records.back();
    const double lhs = std::max(last.res_primal, trace.lambda * last.res_dual);
    CheckReport r = le_report("residuals", last.k, lhs, stop_tol);
    r.tolerance = 0.0;
    r.passed = r.margin >= 0.0;
    return r;
}

CheckReport check_shadow(const Trace& trace, const SolutionPair& p) {
    require_nonempty(trace, "check_shadow");
    const double lambda = trace.lambda;
    const IterateRecord& last = trace.records.back();
    const double lhs = (last.shadow_z - (p.x + lambda * p.b)).norm();
    const double rhs =
        std::sqrt(2.0) * lambda_norm(trace.p(last.k) - PairPoint{p.x, p.b, lambda});
    return le_report("shadow", last.k, lhs, rhs);
}

double solution_residual(const OperatorSpec& a_op, const OperatorSpec& b_op, const VectorH& x,
                         const VectorH& b) {
    return std::max(membership_residual(b_op, {x, b}),
                    membership_residual(a_op, {x, -b}));
}

FitzpatrickEstimate fitzpatrick_estimate(const OperatorSpec& op, const VectorH& x,
                                         const VectorH& xstar, int sample_budget,
                                         std::uint64_t seed) {
    if (x.size() != xstar.size()) {
        throw UsageError("fitzpatrick_estimate: x dimension " + std::to_string(x.size()) +
                         " does not match xstar dimension " + std::to_string(xstar.size()));
    }
    const Eigen::Index n = x.size();
    FitzpatrickEstimate est;
    est.value = -std::numeric_limits<double>::infinity();

    if (membership_residual(op, {x, xstar}) <= 1e-9) {
        est.value = x.dot(xstar);
        est.argmax = {x, xstar};
        est.samples = 1;
    }

    // Graph samples from resolvent evaluations at query-centered Gaussian
    // inputs over three radius scales.
    static constexpr double kRadii[3] = {0.1, 1.0, 10.0};
    Rng rng(seed);
    const double base = 1.0 + x.norm();
    for (int i = 0; i < sample_budget; ++i) {
        const double radius = kRadii[i % 3] * base;
        const VectorH z = x + radius * rng.gaussian(n);
        GraphPair g = resolve(op, 1.0, z, 0.0);
        const double value = x.dot(g.v) + g.x.dot(xstar) - g.x.dot(g.v);
        ++est.samples;
        if (value > est.value) {
            est.value = value;
            est.argmax = std::move(g);
        }
    }
    return est;
}

GraphClosureResult check_graph_closure(std::span<const OperatorSpec> ops,
                                       const std::vector<std::vector<GraphPair>>& sequences,
                                       const VectorH& x_limit,
                                       const std::vector<VectorH>& value_limits,
                                       double conclusion_tol, double hypothesis_tol) {
    const std::size_t m = ops.size();
    if (m == 0 || sequences.size() != m || value_limits.size() != m) {
        throw UsageError("check_graph_closure: need one sequence and one value limit per "
                         "operator");
    }
    const std::size_t len = sequences[0].size();
    if (len < 2) throw UsageError("check_graph_closure: sequences must have length >= 2");
    for (std::size_t k = 0; k < m; ++k) {
        if (sequences[k].size() != len) {
            throw UsageError("check_graph_closure: sequence length mismatch (" +
                             std::to_string(sequences[k].size()) + " vs " +
                             std::to_string(len) + ")");
        }
        for (std::size_t i = 0; i < len; ++i) {
            const double res = membership_residual(ops[k], sequences[k][i]);
            if (res > 1e-9) {
                throw UsageError("check_graph_closure: element " + std::to_string(i) +
                                 " of sequence " + std::to_string(k) +
                                 " fails graph membership (residual " + std::to_string(res) +
                                 ")");
            }
        }
    }

    VectorH value_limit_sum = value_limits[0];
    for (std::size_t k = 1; k < m; ++k) value_limit_sum += value_limits[k];

    // The hypotheses are asymptotic; measure them over the trailing window.
    const std::size_t window =
        std::min(len, std::max<std::size_t>(10, (len + 4) / 5));
    double violation = 0.0;
    for (std::size_t i = len - window; i < len; ++i) {
        VectorH value_sum = sequences[0][i].v;
        for (std::size_t k = 1; k < m; ++k) value_sum += sequences[k][i].v;
        violation = std::max(violation, (value_sum - value_limit_sum).norm());
        for (std::size_t k = 0; k < m; ++k) {
            violation = std::max(violation, (sequences[k][i].x - x_limit).norm());
            violation = std::max(violation, (sequences[k][i].v - value_limits[k]).norm());
            for (std::size_t j = k + 1; j < m; ++j) {
                violation =
                    std::max(violation, (sequences[k][i].x - sequences[j][i].x).norm());
            }
        }
    }

    double worst_residual = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        worst_residual =
            std::max(worst_residual, membership_residual(ops[k], {x_limit, value_limits[k]}));
    }

    // "surrogate" in the names: these certify the finite-sequence stand-in
    // for an asymptotic statement, nothing stronger.
    GraphClosureResult result;
    result.hypothesis =
        le_report("graph_closure_surrogate_hypothesis", -1, violation, hypothesis_tol);
    result.hypothesis.tolerance = 0.0;
    result.hypothesis.passed = result.hypothesis.margin >= 0.0;
    result.conclusion =
        le_report("graph_closure_surrogate_conclusion", -1, worst_residual, conclusion_tol);
    result.conclusion.tolerance = 0.0;
    result.conclusion.passed = result.conclusion.margin >= 0.0;
    return result;
}

}  // namespace drsplit
