#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drsplit/operators.hpp"
#include "drsplit/solver.hpp"

namespace drsplit {

/// A member (x, b) of the extended solution set: b in B(x) and -b in A(x).
struct SolutionPair {
    VectorH x;
    VectorH b;
};

/// Throws UsageError (reporting both membership residuals) unless p satisfies
/// the extended-solution-set inclusions within 1e-9.
void validate_solution_pair(const OperatorSpec& a_op, const OperatorSpec& b_op,
                            const SolutionPair& p);

/// Outcome of one checked inequality or identity. margin is oriented so that
/// a pass is margin >= -tolerance: slack-side minus deficit-side for
/// inequalities, -|lhs - rhs| for identities.
struct CheckReport {
    std::string name;
    int k = -1;  // iteration index; -1 for whole-trace checks
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Scale-relative slack used by every ">= -eps" check.
inline double check_tolerance(double lhs, double rhs) {
    return 1e-9 * (1.0 + std::abs(lhs) + std::abs(rhs));
}

/// Graph membership of every produced and companion pair, one report per
/// pair per iteration.
std::vector<CheckReport> check_membership(const Trace& trace, const OperatorSpec& a_op,
                                          const OperatorSpec& b_op);

/// The companion identities that the exact pairs satisfy by construction:
///   x_{k-1} - xhat_k = lambda (ahat_k + bhat_k)
///   lambda (b_{k-1} - bhat_k) = xhat_k - yhat_k
///   xhat_k - yhat_k + lambda (ahat_k + bhat_k) = x_{k-1} - yhat_k
/// each to 1e-10 * (1 + scale of the vectors involved).
std::vector<CheckReport> check_companion_identities(const Trace& trace);

/// Transfer of the per-step tolerances to the weighted pair metric:
///   ||(y_k - yhat_k, a_k - ahat_k)||_lambda <= alpha_k
///   ||(x_k - xhat_k, b_k - bhat_k)||_lambda <= alpha_k + beta_k
std::vector<CheckReport> check_inexactness(const Trace& trace);

/// The descent inequality behind quasi-Fejer monotonicity: for any extended
/// solution p,
///   ||p_{k-1} - p||^2 >= ||phat_k - p||^2 + ||x_{k-1} - yhat_k||^2,
/// plus the equality ||x_{k-1} - yhat_k|| = lambda ||ahat_k + b_{k-1}||.
std::vector<CheckReport> check_fejer_descent(const Trace& trace, const OperatorSpec& a_op,
                                             const OperatorSpec& b_op, const SolutionPair& p);

/// Quasi-Fejer step bound: ||p_k - p|| <= alpha_k + beta_k + ||p_{k-1} - p||.
std::vector<CheckReport> check_quasi_fejer(const Trace& trace, const OperatorSpec& a_op,
                                           const OperatorSpec& b_op, const SolutionPair& p);

/// Whole-trace summability bound with M = 1 + sup_k ||p_k - p||:
///   (1/2M) sum_k ||x_{k-1} - yhat_k||^2 <= ||p_0 - p|| + sum_k (alpha_k + beta_k).
CheckReport check_summability_bound(const Trace& trace, const OperatorSpec& a_op,
                                    const OperatorSpec& b_op, const SolutionPair& p);

/// Final residual level against the stopping tolerance (the two residuals
/// driven to zero by the convergence argument).
CheckReport check_residuals(const Trace& trace, double stop_tol);

/// Shadow-point consistency: ||z_K - (x + lambda b)|| for the final iterate
/// against sqrt(2) * ||p_K - p||_lambda.
CheckReport check_shadow(const Trace& trace, const SolutionPair& p);

/// max of the two extended-solution membership residuals at (x, b); the
/// distance-to-solution surrogate used for end-to-end acceptance.
double solution_residual(const OperatorSpec& a_op, const OperatorSpec& b_op, const VectorH& x,
                         const VectorH& b);

/// Sampled lower bound of the Fitzpatrick function of an operator at
/// (x, xstar). The query itself is included as a sample whenever it lies on
/// the graph, so on-graph estimates never fall below the duality product.
struct FitzpatrickEstimate {
    double value = 0.0;
    GraphPair argmax;
    int samples = 0;
};

FitzpatrickEstimate fitzpatrick_estimate(const OperatorSpec& op, const VectorH& x,
                                         const VectorH& xstar, int sample_budget,
                                         std::uint64_t seed);

/// Finite-sequence surrogate of the graph-closure lemma for several maximal
/// monotone operators sharing a primal limit: certifies the hypotheses on a
/// tail window (pairwise primal gaps, sum of dual values vs. its limit,
/// componentwise convergence), then asserts the limit pairs' graph
/// membership. Tolerances are exposed because the conclusion is asymptotic.
struct GraphClosureResult {
    CheckReport hypothesis;  // max hypothesis violation over the tail window
    CheckReport conclusion;  // max membership residual of the limit pairs
};

GraphClosureResult check_graph_closure(std::span<const OperatorSpec> ops,
                                       const std::vector<std::vector<GraphPair>>& sequences,
                                       const VectorH& x_limit,
                                       const std::vector<VectorH>& value_limits,
                                       double conclusion_tol = 1e-6,
                                       double hypothesis_tol = 1e-3);

}  // namespace drsplit
