#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drsplit/hilbert.hpp"
#include "drsplit/operators.hpp"
#include "drsplit/rng.hpp"
#include "drsplit/schedule.hpp"

namespace drsplit {

/// How the per-iteration inexactness is realized. Perturbations are injected
/// through the resolvent *input*, so the produced pairs always belong to the
/// operator graph exactly and only the update equation carries the error.
enum class InexactnessMode {
    Exact,                // copy the exact companions; effective tolerances are 0
    RandomBall,           // perturb by a uniform vector of norm <= tolerance
    AdversarialBoundary,  // perturb by a vector of norm exactly the tolerance
};

enum class SolveStatus { Converged, MaxIter, Failed };

const char* to_string(InexactnessMode mode);
const char* to_string(SolveStatus status);
InexactnessMode inexactness_mode_from_string(const std::string& name);

struct SolverConfig {
    double lambda = 1.0;
    ErrorSchedule schedule = ErrorSchedule::geometric(1e-3, 0.5);
    int max_iter = 5000;
    double stop_tol = 1e-8;
    InexactnessMode mode = InexactnessMode::Exact;
    std::uint64_t seed = 1;

    void validate() const;  // throws UsageError naming the offending field
};

/// One iteration's full state: the produced pairs (y_k, a_k) in A and
/// (x_k, b_k) in B, the exact companion pairs, the schedule tolerances, and
/// every residual the convergence checkers consume.
struct IterateRecord {
    int k = 0;
    VectorH y, a;              // step-1 pair, in A
    VectorH x, b;              // step-2 pair, in B
    VectorH yhat, ahat;        // exact companion of step 1
    VectorH xhat, bhat;        // exact companion of step 2
    double alpha = 0, beta = 0;         // effective tolerances used this iteration
    double res_s1 = 0, res_s2 = 0;      // achieved residuals of the two steps
    double res_primal = 0;              // ||x_{k-1} - y_k||
    double res_dual = 0;                // ||a_k + b_{k-1}||
    VectorH shadow_z;                   // x_k + lambda b_k
};

struct Trace {
    VectorH x0, b0;
    double lambda = 1.0;
    SolveStatus status = SolveStatus::MaxIter;
    std::string message;  // failure detail when status == Failed
    std::vector<IterateRecord> records;

    int iterations() const { return static_cast<int>(records.size()); }

    /// x_{k-1} / b_{k-1} for the 1-based iteration k.
    const VectorH& x_before(int k) const;
    const VectorH& b_before(int k) const;

    /// p_k = (x_k, b_k); k = 0 gives the starting pair.
    PairPoint p(int k) const;
    /// Companion pair (xhat_k, bhat_k), k >= 1.
    PairPoint p_hat(int k) const;
};

/// Starting pair (x0, b0) in B: direct evaluation for single-valued B,
/// otherwise the minimal-norm feasible selection. Throws DomainError when
/// x0 lies outside dom B.
GraphPair init(const SolverConfig& config, const OperatorSpec& b_op, const VectorH& x0);

/// One iteration from (x_{k-1}, b_{k-1}). Computes the exact companions,
/// realizes the two inexact steps within their tolerances, and fills all
/// residual fields. The previous pair must lie in B (residual <= 1e-9).
IterateRecord dr_step(const SolverConfig& config, const OperatorSpec& a_op,
                      const OperatorSpec& b_op, const GraphPair& prev, int k, Rng& rng);

/// Full driver. Projects x0 onto dom B when necessary, then iterates until
/// max(res_primal, lambda * res_dual) <= stop_tol with alpha_k + beta_k <=
/// stop_tol (so inexactness cannot mask convergence), or until max_iter.
/// Failures are captured in the returned status with the trace retained.
Trace solve(const SolverConfig& config, const OperatorSpec& a_op, const OperatorSpec& b_op,
            const VectorH& x0);

}  // namespace drsplit
