#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "drsplit/hilbert.hpp"

namespace drsplit {

enum class OperatorKind {
    AffineMonotone,      // x -> M x + q, M + M^T positive semidefinite
    SubdiffL1,           // w * subdifferential of the l1 norm
    NormalConeBox,       // normal cone of [lo, hi]
    NormalConeHalfspace, // normal cone of {x : <normal, x> <= offset}
    NormalConeAffine,    // normal cone of {x : C x = d}
    QuadraticGradient,   // x -> Q (x - c), Q symmetric positive semidefinite
    ScaledIdentity,      // x -> w x, w >= 0
    Zero,                // x -> 0
    SumShift,            // x -> inner(x) + c
};

const char* to_string(OperatorKind kind);

/// A pair (x, v) asserted to belong to an operator's graph;
/// membership_residual is the independent check.
struct GraphPair {
    VectorH x;
    VectorH v;
};

namespace detail {
struct FactorCache;
}

/// Immutable description of a maximal monotone operator. Construction
/// validates the monotonicity-relevant invariants (PSD checks, box ordering,
/// consistent constraint systems); after that every query is a pure function
/// of its arguments (the linear kinds keep a synchronized single-slot
/// factorization cache, invisible to callers), so concurrent use of one spec
/// is safe.
class OperatorSpec {
public:
    /// Default spec is the zero operator.
    OperatorSpec() = default;

    static OperatorSpec affine_monotone(Eigen::MatrixXd m, VectorH q);
    static OperatorSpec subdiff_l1(double weight);
    static OperatorSpec normal_cone_box(VectorH lo, VectorH hi);
    static OperatorSpec normal_cone_halfspace(VectorH normal, double offset);
    static OperatorSpec normal_cone_affine(Eigen::MatrixXd c, VectorH d);
    static OperatorSpec quadratic_gradient(Eigen::MatrixXd q, VectorH center);
    static OperatorSpec scaled_identity(double weight);
    static OperatorSpec zero();
    static OperatorSpec sum_shift(OperatorSpec inner, VectorH shift);

    OperatorKind kind() const { return kind_; }

    /// Fixed ambient dimension, or 0 for dimension-generic kinds
    /// (scaled_identity, zero, subdiff_l1).
    Eigen::Index dim() const { return dim_; }

    bool single_valued() const;

    /// Value of a single-valued operator; UsageError for set-valued kinds.
    VectorH evaluate(const VectorH& x) const;

    // Kind-specific payload accessors (UsageError when the kind is wrong).
    const Eigen::MatrixXd& matrix() const;       // M, Q or C
    const VectorH& offset_vector() const;        // q or d
    const VectorH& center() const;               // quadratic center c
    const VectorH& box_lo() const;
    const VectorH& box_hi() const;
    const VectorH& halfspace_normal() const;
    double halfspace_offset() const;
    double weight() const;                       // scaled_identity / subdiff_l1
    const OperatorSpec& inner_op() const;        // sum_shift
    const VectorH& shift() const;                // sum_shift

    /// Row-space / equality-set least-squares solver, present only for
    /// NormalConeAffine.
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>& equality_solver() const;

    /// LU of (I + lambda * matrix()) for the linear kinds, rebuilt when
    /// lambda changes and reused across calls with the same lambda.
    std::shared_ptr<const Eigen::PartialPivLU<Eigen::MatrixXd>>
    linear_system_factorization(double lambda) const;

private:
    OperatorKind kind_ = OperatorKind::Zero;
    Eigen::Index dim_ = 0;
    Eigen::MatrixXd mat_;
    VectorH vec_;
    VectorH center_;
    VectorH lo_, hi_;
    VectorH normal_;
    VectorH shift_;
    VectorH quad_qc_;  // Q * c, precomputed for QuadraticGradient
    double offset_ = 0.0;
    double weight_ = 0.0;
    std::shared_ptr<const OperatorSpec> inner_;
    std::shared_ptr<const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> cod_;
    std::shared_ptr<detail::FactorCache> factor_cache_;

    friend GraphPair resolve(const OperatorSpec& op, double lambda, const VectorH& z,
                             double tol);
};

/// Resolvent evaluation: the unique (x, v) in the operator's graph with
/// x + lambda v = z. v is recovered as (z - x)/lambda, so the identity holds
/// to rounding whenever x does; graph membership is exact for the
/// closed-form kinds and residual-bounded for the iterative path.
/// tol = 0 demands the exact/closed-form (or direct-factorization) path;
/// tol > 0 allows the iterative fallback to stop at that residual.
GraphPair resolve(const OperatorSpec& op, double lambda, const VectorH& z, double tol);

/// How far (x, v) is from the operator's graph: exact Euclidean distance to
/// the graph for the set-valued kinds (computable in closed form per
/// coordinate / constraint), ||v - op(x)|| for single-valued kinds. Zero
/// exactly on graph members.
double membership_residual(const OperatorSpec& op, const GraphPair& pair);

/// Minimum of <x_i - x_j, v_i - v_j> over all pairs from the sample; for a
/// correct monotone operator this is >= -1e-10. Requires >= 2 pairs, each
/// within 1e-9 of the graph.
double monotonicity_probe(const OperatorSpec& op, std::span<const GraphPair> pairs);

/// Distance from x to the operator's domain (0 for full-domain kinds).
double domain_distance(const OperatorSpec& op, const VectorH& x);

/// Projection of x onto the operator's domain (identity for full-domain kinds).
VectorH project_domain(const OperatorSpec& op, const VectorH& x);

/// Minimal-norm element of op(x), or nullopt when x is outside the domain.
std::optional<VectorH> min_norm_value(const OperatorSpec& op, const VectorH& x);

namespace detail {
/// Conjugate gradient on the normal equations of A x = rhs; stops when
/// ||A x - rhs|| <= target. Exposed for direct testing against the dense
/// factorization path.
VectorH solve_normal_cg(const Eigen::MatrixXd& a, const VectorH& rhs, double target,
                        int max_iter, double* achieved = nullptr);
}  // namespace detail

}  // namespace drsplit
