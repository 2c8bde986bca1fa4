#include "drsplit/solver.hpp"

#include <cmath>
#include <utility>

#include "drsplit/errors.hpp"

namespace drsplit {

const char* to_string(InexactnessMode mode) {
    switch (mode) {
        case InexactnessMode::Exact: return "exact";
        case InexactnessMode::RandomBall: return "random_ball";
        case InexactnessMode::AdversarialBoundary: return "adversarial_boundary";
    }
    return "?";
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIter: return "max_iter";
        case SolveStatus::Failed: return "failed";
    }
    return "?";
}

InexactnessMode inexactness_mode_from_string(const std::string& name) {
    if (name == "exact") return InexactnessMode::Exact;
    if (name == "random_ball") return InexactnessMode::RandomBall;
    if (name == "adversarial_boundary") return InexactnessMode::AdversarialBoundary;
    throw UsageError("inexactness_mode: unknown mode '" + name +
                     "' (expected exact, random_ball or adversarial_boundary)");
}

void SolverConfig::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw UsageError("solver.lambda: must be > 0");
    }
    if (!(stop_tol > 0.0)) throw UsageError("solver.stop_tol: must be > 0");
    if (max_iter < 1) throw UsageError("solver.max_iter: must be >= 1");
}

const VectorH& Trace::x_before(int k) const {
    return k <= 1 ? x0 : records[static_cast<std::size_t>(k) - 2].x;
}

const VectorH& Trace::b_before(int k) const {
    return k <= 1 ? b0 : records[static_cast<std::size_t>(k) - 2].b;
}

PairPoint Trace::p(int k) const {
    if (k == 0) return {x0, b0, lambda};
    const IterateRecord& r = records.at(static_cast<std::size_t>(k) - 1);
    return {r.x, r.b, lambda};
}

PairPoint Trace::p_hat(int k) const {
    const IterateRecord& r = records.at(static_cast<std::size_t>(k) - 1);
    return {r.xhat, r.bhat, lambda};
}

GraphPair init(const SolverConfig& config, const OperatorSpec& b_op, const VectorH& x0) {
    config.validate();
    if (!all_finite(x0)) throw UsageError("init: x0 must be finite");
    if (b_op.single_valued()) {
        return {x0, b_op.evaluate(x0)};
    }
    auto v = min_norm_value(b_op, x0);
    if (!v) {
        throw DomainError("init: x0 is outside dom B (distance " +
                          std::to_string(domain_distance(b_op, x0)) +
                          "); project x0 onto the domain first");
    }
    return {x0, std::move(*v)};
}

namespace {

// Perturbation applied to the resolvent input for one inexact step.
VectorH step_perturbation(InexactnessMode mode, double tolerance, const VectorH& direction,
                          Eigen::Index n, Rng& rng) {
    switch (mode) {
        case InexactnessMode::Exact:
            return VectorH::Zero(n);
        case InexactnessMode::RandomBall:
            return rng.in_ball(n, tolerance);
        case InexactnessMode::AdversarialBoundary: {
            if (tolerance == 0.0) return VectorH::Zero(n);
            const double norm = direction.norm();
            if (norm == 0.0) {
                VectorH e = VectorH::Zero(n);
                e[0] = tolerance;  // deterministic tie-break: first basis vector
                return e;
            }
            return direction * (tolerance / norm);
        }
    }
    return VectorH::Zero(n);
}

}  // namespace

IterateRecord dr_step(const SolverConfig& config, const OperatorSpec& a_op,
                      const OperatorSpec& b_op, const GraphPair& prev, int k, Rng& rng) {
    const double lambda = config.lambda;
    const Eigen::Index n = prev.x.size();

    {
        const double res = membership_residual(b_op, prev);
        if (res > 1e-9) {
            throw ContractError("dr_step: previous pair is not in B (membership residual " +
                                std::to_string(res) + ")");
        }
    }

    IterateRecord rec;
    rec.k = k;

    // Exact companions first.
    const VectorH z1 = prev.x - lambda * prev.v;
    GraphPair comp1 = resolve(a_op, lambda, z1, 0.0);
    const VectorH z2_hat = comp1.x + lambda * prev.v;
    GraphPair comp2 = resolve(b_op, lambda, z2_hat, 0.0);

    const double companion_scale = 1.0 + prev.x.norm() + lambda * prev.v.norm();
    const double e1 = (comp1.x + lambda * comp1.v - z1).norm();
    const double e2 = (comp2.x + lambda * comp2.v - z2_hat).norm();
    if (e1 > 1e-10 * companion_scale || e2 > 1e-10 * companion_scale) {
        throw ContractError("dr_step: companion resolvent identity violated (residuals " +
                            std::to_string(e1) + ", " + std::to_string(e2) + ")");
    }

    if (config.mode == InexactnessMode::Exact) {
        rec.alpha = 0.0;
        rec.beta = 0.0;
    } else {
        std::tie(rec.alpha, rec.beta) = schedule_values(config.schedule, k);
    }

    // Step 1: (y_k, a_k) in A within alpha_k of the exact update equation.
    GraphPair step1;
    if (config.mode == InexactnessMode::Exact) {
        step1 = comp1;
    } else {
        const VectorH e = step_perturbation(config.mode, rec.alpha, prev.x - comp1.x, n, rng);
        step1 = resolve(a_op, lambda, z1 + e, 0.0);
    }
    rec.res_s1 = (step1.x + lambda * step1.v - z1).norm();
    if (rec.res_s1 > rec.alpha + 1e-12 * (1.0 + z1.norm() + rec.alpha)) {
        throw ContractError("dr_step: step-1 residual " + std::to_string(rec.res_s1) +
                            " exceeds tolerance " + std::to_string(rec.alpha));
    }

    // Step 2 uses the actually computed y_k.
    const VectorH z2 = step1.x + lambda * prev.v;
    GraphPair step2;
    if (config.mode == InexactnessMode::Exact) {
        step2 = comp2;
    } else {
        const VectorH e = step_perturbation(config.mode, rec.beta, step1.x - comp2.x, n, rng);
        step2 = resolve(b_op, lambda, z2 + e, 0.0);
    }
    rec.res_s2 = (step2.x + lambda * step2.v - z2).norm();
    if (rec.res_s2 > rec.beta + 1e-12 * (1.0 + z2.norm() + rec.beta)) {
        throw ContractError("dr_step: step-2 residual " + std::to_string(rec.res_s2) +
                            " exceeds tolerance " + std::to_string(rec.beta));
    }

    rec.res_primal = (prev.x - step1.x).norm();
    rec.res_dual = (step1.v + prev.v).norm();

    rec.y = std::move(step1.x);
    rec.a = std::move(step1.v);
    rec.x = std::move(step2.x);
    rec.b = std::move(step2.v);
    rec.yhat = std::move(comp1.x);
    rec.ahat = std::move(comp1.v);
    rec.xhat = std::move(comp2.x);
    rec.bhat = std::move(comp2.v);
    rec.shadow_z = rec.x + lambda * rec.b;
    return rec;
}

Trace solve(const SolverConfig& config, const OperatorSpec& a_op, const OperatorSpec& b_op,
            const VectorH& x0) {
    config.validate();
    Trace trace;
    trace.lambda = config.lambda;
    Rng rng(config.seed);
    try {
        if (!all_finite(x0)) throw UsageError("solve: x0 must be finite");
        const VectorH x0_feasible = project_domain(b_op, x0);
        GraphPair prev = init(config, b_op, x0_feasible);
        trace.x0 = prev.x;
        trace.b0 = prev.v;
        for (int k = 1; k <= config.max_iter; ++k) {
            IterateRecord rec = dr_step(config, a_op, b_op, prev, k, rng);
            prev.x = rec.x;
            prev.v = rec.b;
            const double stop_res = std::max(rec.res_primal, config.lambda * rec.res_dual);
            const bool schedule_settled = rec.alpha + rec.beta <= config.stop_tol;
            trace.records.push_back(std::move(rec));
            if (stop_res <= config.stop_tol && schedule_settled) {
                trace.status = SolveStatus::Converged;
                return trace;
            }
        }
        trace.status = SolveStatus::MaxIter;
    } catch (const std::exception& e) {
        trace.status = SolveStatus::Failed;
        trace.message = e.what();
    }
    return trace;
}

}  // namespace drsplit
