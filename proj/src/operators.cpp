#include "drsplit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "drsplit/errors.hpp"

namespace drsplit {

namespace detail {
struct FactorCache {
    std::mutex mu;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    std::shared_ptr<const Eigen::PartialPivLU<Eigen::MatrixXd>> lu;
};
}  // namespace detail

const char* to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::AffineMonotone: return "affine_monotone";
        case OperatorKind::SubdiffL1: return "subdiff_l1";
        case OperatorKind::NormalConeBox: return "normal_cone_box";
        case OperatorKind::NormalConeHalfspace: return "normal_cone_halfspace";
        case OperatorKind::NormalConeAffine: return "normal_cone_affine";
        case OperatorKind::QuadraticGradient: return "quadratic_gradient";
        case OperatorKind::ScaledIdentity: return "scaled_identity";
        case OperatorKind::Zero: return "zero";
        case OperatorKind::SumShift: return "sum_shift";
    }
    return "?";
}

namespace {

constexpr double kPsdTol = 1e-10;  // construction check slack for PSD parts

void require_finite(const VectorH& v, const char* what) {
    if (!v.allFinite()) throw UsageError(std::string(what) + ": entries must be finite");
}

void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw UsageError(std::string(what) + ": entries must be finite");
}

void require_dim(const OperatorSpec& op, const VectorH& x, const char* what) {
    if (op.dim() > 0 && x.size() != op.dim()) {
        throw UsageError(std::string(what) + ": vector dimension " + std::to_string(x.size()) +
                         " does not match operator dimension " + std::to_string(op.dim()));
    }
}

bool psd_within(const Eigen::MatrixXd& sym, double tol) {
    if (sym.rows() <= 2000) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff() >= -tol;
    }
    // Large case: a Cholesky factorization of the shifted matrix certifies
    // the same bound without an O(n^3)-with-large-constant eigensolve.
    Eigen::MatrixXd shifted = sym;
    shifted.diagonal().array() += tol;
    return Eigen::LLT<Eigen::MatrixXd>(shifted).info() == Eigen::Success;
}

double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

// Distance from (x, v) to the graph of w * subdiff |.| in one coordinate.
// The graph is (-inf,0]x{-w}  union  {0}x[-w,w]  union  [0,inf)x{w}.
double l1_graph_dist_1d(double x, double v, double w) {
    const double d_zero = hypot2(x, std::max(std::abs(v) - w, 0.0));
    const double d_pos = hypot2(std::max(-x, 0.0), std::abs(v - w));
    const double d_neg = hypot2(std::max(x, 0.0), std::abs(v + w));
    return std::min({d_zero, d_pos, d_neg});
}

// Distance from (x, v) to the graph of the normal cone of [lo, hi] in one
// coordinate: [lo,hi]x{0}  union  {lo}x(-inf,0]  union  {hi}x[0,inf).
double box_graph_dist_1d(double x, double v, double lo, double hi) {
    const double x_clamped = std::clamp(x, lo, hi);
    const double d_flat = hypot2(x - x_clamped, v);
    const double d_lo = hypot2(x - lo, std::max(v, 0.0));
    const double d_hi = hypot2(x - hi, std::max(-v, 0.0));
    return std::min({d_flat, d_lo, d_hi});
}

// Distance from v to the ray {t * a : t >= 0}.
double ray_dist(const VectorH& v, const VectorH& a) {
    const double t = std::max(v.dot(a) / a.squaredNorm(), 0.0);
    return (v - t * a).norm();
}

}  // namespace

OperatorSpec OperatorSpec::affine_monotone(Eigen::MatrixXd m, VectorH q) {
    if (m.rows() != m.cols()) throw UsageError("affine_monotone: M must be square");
    if (m.rows() != q.size()) {
        throw UsageError("affine_monotone: q dimension " + std::to_string(q.size()) +
                         " does not match M dimension " + std::to_string(m.rows()));
    }
    require_finite(m, "affine_monotone M");
    require_finite(q, "affine_monotone q");
    if (!psd_within(m + m.transpose(), kPsdTol)) {
        throw UsageError("affine_monotone: M + M^T must be positive semidefinite "
                         "(smallest eigenvalue below -1e-10)");
    }
    OperatorSpec op;
    op.kind_ = OperatorKind::AffineMonotone;
    op.dim_ = m.rows();
    op.mat_ = std::move(m);
    op.vec_ = std::move(q);
    op.factor_cache_ = std::make_shared<detail::FactorCache>();
    return op;
}

OperatorSpec OperatorSpec::subdiff_l1(double weight) {
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw UsageError("subdiff_l1: weight must be >= 0");
    }
    OperatorSpec op;
    op.kind_ = OperatorKind::SubdiffL1;
    op.weight_ = weight;
    return op;
}

OperatorSpec OperatorSpec::normal_cone_box(VectorH lo, VectorH hi) {
    if (lo.size() != hi.size()) {
        throw UsageError("normal_cone_box: lo dimension " + std::to_string(lo.size()) +
                         " does not match hi dimension " + std::to_string(hi.size()));
    }
    require_finite(lo, "normal_cone_box lo");
    require_finite(hi, "normal_cone_box hi");
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (lo[i] > hi[i]) {
            throw UsageError("normal_cone_box: lo > hi at coordinate " + std::to_string(i));
        }
    }
    OperatorSpec op;
    op.kind_ = OperatorKind::NormalConeBox;
    op.dim_ = lo.size();
    op.lo_ = std::move(lo);
    op.hi_ = std::move(hi);
    return op;
}

OperatorSpec OperatorSpec::normal_cone_halfspace(VectorH normal, double offset) {
    require_finite(normal, "normal_cone_halfspace normal");
    if (normal.norm() == 0.0) throw UsageError("normal_cone_halfspace: normal must be nonzero");
    if (!std::isfinite(offset)) throw UsageError("normal_cone_halfspace: offset must be finite");
    OperatorSpec op;
    op.kind_ = OperatorKind::NormalConeHalfspace;
    op.dim_ = normal.size();
    op.normal_ = std::move(normal);
    op.offset_ = offset;
    return op;
}

OperatorSpec OperatorSpec::normal_cone_affine(Eigen::MatrixXd c, VectorH d) {
    if (c.rows() != d.size()) {
        throw UsageError("normal_cone_affine: d dimension " + std::to_string(d.size()) +
                         " does not match C row count " + std::to_string(c.rows()));
    }
    require_finite(c, "normal_cone_affine C");
    require_finite(d, "normal_cone_affine d");
    auto cod = std::make_shared<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>>(c);
    // The constraint set must be nonempty: d in range(C).
    VectorH x_ls = cod->solve(d);
    if ((c * x_ls - d).norm() > 1e-9 * (1.0 + d.norm())) {
        throw UsageError("normal_cone_affine: C x = d has no solution (empty constraint set)");
    }
    OperatorSpec op;
    op.kind_ = OperatorKind::NormalConeAffine;
    op.dim_ = c.cols();
    op.mat_ = std::move(c);
    op.vec_ = std::move(d);
    op.cod_ = std::move(cod);
    return op;
}

OperatorSpec OperatorSpec::quadratic_gradient(Eigen::MatrixXd q, VectorH center) {
    if (q.rows() != q.cols()) throw UsageError("quadratic_gradient: Q must be square");
    if (q.rows() != center.size()) {
        throw UsageError("quadratic_gradient: c dimension " + std::to_string(center.size()) +
                         " does not match Q dimension " + std::to_string(q.rows()));
    }
    require_finite(q, "quadratic_gradient Q");
    require_finite(center, "quadratic_gradient c");
    const double scale = 1.0 + q.cwiseAbs().maxCoeff();
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw UsageError("quadratic_gradient: Q must be symmetric");
    }
    if (!psd_within(q, kPsdTol)) {
        throw UsageError("quadratic_gradient: Q must be positive semidefinite");
    }
    OperatorSpec op;
    op.kind_ = OperatorKind::QuadraticGradient;
    op.dim_ = q.rows();
    op.mat_ = std::move(q);
    op.center_ = std::move(center);
    op.quad_qc_ = op.mat_ * op.center_;
    op.factor_cache_ = std::make_shared<detail::FactorCache>();
    return op;
}

OperatorSpec OperatorSpec::scaled_identity(double weight) {
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw UsageError("scaled_identity: weight must be >= 0 for monotonicity");
    }
    OperatorSpec op;
    op.kind_ = OperatorKind::ScaledIdentity;
    op.weight_ = weight;
    return op;
}

OperatorSpec OperatorSpec::zero() {
    return OperatorSpec{};
}

OperatorSpec OperatorSpec::sum_shift(OperatorSpec inner, VectorH shift) {
    require_finite(shift, "sum_shift c");
    if (inner.dim() > 0 && inner.dim() != shift.size()) {
        throw UsageError("sum_shift: shift dimension " + std::to_string(shift.size()) +
                         " does not match inner operator dimension " +
                         std::to_string(inner.dim()));
    }
    OperatorSpec op;
    op.kind_ = OperatorKind::SumShift;
    op.dim_ = shift.size();
    op.shift_ = std::move(shift);
    op.inner_ = std::make_shared<const OperatorSpec>(std::move(inner));
    return op;
}

bool OperatorSpec::single_valued() const {
    switch (kind_) {
        case OperatorKind::AffineMonotone:
        case OperatorKind::QuadraticGradient:
        case OperatorKind::ScaledIdentity:
        case OperatorKind::Zero:
            return true;
        case OperatorKind::SumShift:
            return inner_->single_valued();
        default:
            return false;
    }
}

VectorH OperatorSpec::evaluate(const VectorH& x) const {
    require_dim(*this, x, "evaluate");
    switch (kind_) {
        case OperatorKind::AffineMonotone: return mat_ * x + vec_;
        case OperatorKind::QuadraticGradient: return mat_ * (x - center_);
        case OperatorKind::ScaledIdentity: return weight_ * x;
        case OperatorKind::Zero: return VectorH::Zero(x.size());
        case OperatorKind::SumShift: return inner_->evaluate(x) + shift_;
        default:
            throw UsageError(std::string("evaluate: operator kind ") + to_string(kind_) +
                             " is set-valued");
    }
}

namespace {
[[noreturn]] void wrong_kind(const char* accessor, OperatorKind kind) {
    throw UsageError(std::string(accessor) + ": not available for operator kind " +
                     to_string(kind));
}
}  // namespace

const Eigen::MatrixXd& OperatorSpec::matrix() const {
    if (kind_ != OperatorKind::AffineMonotone && kind_ != OperatorKind::QuadraticGradient &&
        kind_ != OperatorKind::NormalConeAffine) {
        wrong_kind("matrix", kind_);
    }
    return mat_;
}
const VectorH& OperatorSpec::offset_vector() const {
    if (kind_ != OperatorKind::AffineMonotone && kind_ != OperatorKind::NormalConeAffine) {
        wrong_kind("offset_vector", kind_);
    }
    return vec_;
}
const VectorH& OperatorSpec::center() const {
    if (kind_ != OperatorKind::QuadraticGradient) wrong_kind("center", kind_);
    return center_;
}
const VectorH& OperatorSpec::box_lo() const {
    if (kind_ != OperatorKind::NormalConeBox) wrong_kind("box_lo", kind_);
    return lo_;
}
const VectorH& OperatorSpec::box_hi() const {
    if (kind_ != OperatorKind::NormalConeBox) wrong_kind("box_hi", kind_);
    return hi_;
}
const VectorH& OperatorSpec::halfspace_normal() const {
    if (kind_ != OperatorKind::NormalConeHalfspace) wrong_kind("halfspace_normal", kind_);
    return normal_;
}
double OperatorSpec::halfspace_offset() const {
    if (kind_ != OperatorKind::NormalConeHalfspace) wrong_kind("halfspace_offset", kind_);
    return offset_;
}
double OperatorSpec::weight() const {
    if (kind_ != OperatorKind::ScaledIdentity && kind_ != OperatorKind::SubdiffL1) {
        wrong_kind("weight", kind_);
    }
    return weight_;
}
const OperatorSpec& OperatorSpec::inner_op() const {
    if (kind_ != OperatorKind::SumShift) wrong_kind("inner_op", kind_);
    return *inner_;
}
const VectorH& OperatorSpec::shift() const {
    if (kind_ != OperatorKind::SumShift) wrong_kind("shift", kind_);
    return shift_;
}
const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>&
OperatorSpec::equality_solver() const {
    if (kind_ != OperatorKind::NormalConeAffine) wrong_kind("equality_solver", kind_);
    return *cod_;
}

std::shared_ptr<const Eigen::PartialPivLU<Eigen::MatrixXd>>
OperatorSpec::linear_system_factorization(double lambda) const {
    if (kind_ != OperatorKind::AffineMonotone && kind_ != OperatorKind::QuadraticGradient) {
        wrong_kind("linear_system_factorization", kind_);
    }
    detail::FactorCache& cache = *factor_cache_;
    std::lock_guard<std::mutex> lock(cache.mu);
    if (cache.lambda != lambda || !cache.lu) {
        Eigen::MatrixXd sys = lambda * mat_;
        sys.diagonal().array() += 1.0;
        cache.lu = std::make_shared<const Eigen::PartialPivLU<Eigen::MatrixXd>>(sys);
        cache.lambda = lambda;
    }
    return cache.lu;
}

namespace detail {

VectorH solve_normal_cg(const Eigen::MatrixXd& a, const VectorH& rhs, double target,
                        int max_iter, double* achieved) {
    VectorH x = VectorH::Zero(a.cols());
    VectorH r = a.transpose() * rhs;  // residual of the normal equations at x = 0
    VectorH p = r;
    double rs = r.squaredNorm();
    double true_res = rhs.norm();
    for (int it = 0; it < max_iter && true_res > target; ++it) {
        const VectorH ap = a * p;
        const VectorH w = a.transpose() * ap;
        const double denom = p.dot(w);
        if (denom <= 0.0) break;  // numerical breakdown
        const double step = rs / denom;
        x += step * p;
        r -= step * w;
        const double rs_next = r.squaredNorm();
        p = r + (rs_next / rs) * p;
        rs = rs_next;
        true_res = (a * x - rhs).norm();
    }
    if (achieved) *achieved = true_res;
    if (true_res > target) {
        throw NonconvergenceError(
            "conjugate gradient missed residual target " + std::to_string(target) +
                " (achieved " + std::to_string(true_res) + ")",
            true_res);
    }
    return x;
}

}  // namespace detail

GraphPair resolve(const OperatorSpec& op, double lambda, const VectorH& z, double tol) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw UsageError("resolve: lambda must be positive");
    }
    if (!(tol >= 0.0)) throw UsageError("resolve: tol must be >= 0");
    require_finite(z, "resolve z");
    require_dim(op, z, "resolve");
    const Eigen::Index n = z.size();

    VectorH x;
    switch (op.kind()) {
        case OperatorKind::ScaledIdentity:
            x = z / (1.0 + lambda * op.weight());
            break;
        case OperatorKind::Zero:
            x = z;
            break;
        case OperatorKind::SubdiffL1: {
            const double t = lambda * op.weight();
            x.resize(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double zi = z[i];
                x[i] = zi > t ? zi - t : (zi < -t ? zi + t : 0.0);
            }
            break;
        }
        case OperatorKind::NormalConeBox:
            x = z.cwiseMax(op.box_lo()).cwiseMin(op.box_hi());
            break;
        case OperatorKind::NormalConeHalfspace: {
            const VectorH& a = op.halfspace_normal();
            const double excess = a.dot(z) - op.halfspace_offset();
            x = excess > 0.0 ? VectorH(z - (excess / a.squaredNorm()) * a) : z;
            break;
        }
        case OperatorKind::NormalConeAffine: {
            const VectorH r = op.matrix() * z - op.offset_vector();
            x = z - op.equality_solver().solve(r);
            break;
        }
        case OperatorKind::QuadraticGradient: {
            const VectorH rhs = z + lambda * op.quad_qc_;
            x = op.linear_system_factorization(lambda)->solve(rhs);
            break;
        }
        case OperatorKind::AffineMonotone: {
            const VectorH rhs = z - lambda * op.offset_vector();
            if (n <= 2000) {
                x = op.linear_system_factorization(lambda)->solve(rhs);
            } else {
                Eigen::MatrixXd sys = lambda * op.matrix();
                sys.diagonal().array() += 1.0;
                const double target = std::max(tol / 2.0, 1e-13 * (1.0 + z.norm()));
                x = detail::solve_normal_cg(sys, rhs, target, 10 * static_cast<int>(n) + 100);
            }
            break;
        }
        case OperatorKind::SumShift: {
            GraphPair g = resolve(op.inner_op(), lambda, z - lambda * op.shift(), tol);
            x = std::move(g.x);
            break;
        }
    }

    VectorH v = (z - x) / lambda;
    return {std::move(x), std::move(v)};
}

double membership_residual(const OperatorSpec& op, const GraphPair& pair) {
    if (pair.x.size() != pair.v.size()) {
        throw UsageError("membership_residual: x dimension " + std::to_string(pair.x.size()) +
                         " does not match v dimension " + std::to_string(pair.v.size()));
    }
    require_dim(op, pair.x, "membership_residual");
    switch (op.kind()) {
        case OperatorKind::AffineMonotone:
        case OperatorKind::QuadraticGradient:
        case OperatorKind::ScaledIdentity:
        case OperatorKind::Zero:
            return (pair.v - op.evaluate(pair.x)).norm();
        case OperatorKind::SubdiffL1: {
            double sq = 0.0;
            for (Eigen::Index i = 0; i < pair.x.size(); ++i) {
                const double d = l1_graph_dist_1d(pair.x[i], pair.v[i], op.weight());
                sq += d * d;
            }
            return std::sqrt(sq);
        }
        case OperatorKind::NormalConeBox: {
            double sq = 0.0;
            for (Eigen::Index i = 0; i < pair.x.size(); ++i) {
                const double d =
                    box_graph_dist_1d(pair.x[i], pair.v[i], op.box_lo()[i], op.box_hi()[i]);
                sq += d * d;
            }
            return std::sqrt(sq);
        }
        case OperatorKind::NormalConeHalfspace: {
            const VectorH& a = op.halfspace_normal();
            const double s = (a.dot(pair.x) - op.halfspace_offset()) / a.norm();
            const double d_interior = hypot2(std::max(s, 0.0), pair.v.norm());
            const double d_boundary = hypot2(s, ray_dist(pair.v, a));
            return std::min(d_interior, d_boundary);
        }
        case OperatorKind::NormalConeAffine: {
            const auto& solver = op.equality_solver();
            const double dx = solver.solve(op.matrix() * pair.x - op.offset_vector()).norm();
            // range(C^T) projector is C^+ C
            const double dv = (pair.v - solver.solve(op.matrix() * pair.v)).norm();
            return hypot2(dx, dv);
        }
        case OperatorKind::SumShift:
            return membership_residual(op.inner_op(),
                                       {pair.x, pair.v - op.shift()});
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double monotonicity_probe(const OperatorSpec& op, std::span<const GraphPair> pairs) {
    if (pairs.size() < 2) {
        throw UsageError("monotonicity_probe: need at least 2 graph pairs (got " +
                         std::to_string(pairs.size()) + ")");
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double res = membership_residual(op, pairs[i]);
        if (res > 1e-9) {
            throw UsageError("monotonicity_probe: pair " + std::to_string(i) +
                             " fails graph membership (residual " + std::to_string(res) + ")");
        }
    }
    double min_product = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            const double prod =
                (pairs[i].x - pairs[j].x).dot(pairs[i].v - pairs[j].v);
            min_product = std::min(min_product, prod);
        }
    }
    return min_product;
}

double domain_distance(const OperatorSpec& op, const VectorH& x) {
    require_dim(op, x, "domain_distance");
    switch (op.kind()) {
        case OperatorKind::NormalConeBox:
            return (x - x.cwiseMax(op.box_lo()).cwiseMin(op.box_hi())).norm();
        case OperatorKind::NormalConeHalfspace: {
            const VectorH& a = op.halfspace_normal();
            return std::max(a.dot(x) - op.halfspace_offset(), 0.0) / a.norm();
        }
        case OperatorKind::NormalConeAffine:
            return op.equality_solver().solve(op.matrix() * x - op.offset_vector()).norm();
        case OperatorKind::SumShift:
            return domain_distance(op.inner_op(), x);
        default:
            return 0.0;
    }
}

VectorH project_domain(const OperatorSpec& op, const VectorH& x) {
    require_dim(op, x, "project_domain");
    switch (op.kind()) {
        case OperatorKind::NormalConeBox:
            return x.cwiseMax(op.box_lo()).cwiseMin(op.box_hi());
        case OperatorKind::NormalConeHalfspace: {
            const VectorH& a = op.halfspace_normal();
            const double excess = a.dot(x) - op.halfspace_offset();
            return excess > 0.0 ? VectorH(x - (excess / a.squaredNorm()) * a) : x;
        }
        case OperatorKind::NormalConeAffine:
            return x - op.equality_solver().solve(op.matrix() * x - op.offset_vector());
        case OperatorKind::SumShift:
            return project_domain(op.inner_op(), x);
        default:
            return x;
    }
}

namespace {

// Point of op(x) closest to target; assumes x is in the domain. Boundary
// activity uses exact comparisons: every producer in this library lands
// boundary points exactly (clamping, soft thresholding), and the affine
// kinds have x-independent value sets.
VectorH value_projection(const OperatorSpec& op, const VectorH& x, const VectorH& target) {
    switch (op.kind()) {
        case OperatorKind::SubdiffL1: {
            VectorH v(x.size());
            const double w = op.weight();
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                v[i] = x[i] > 0.0 ? w : (x[i] < 0.0 ? -w : std::clamp(target[i], -w, w));
            }
            return v;
        }
        case OperatorKind::NormalConeBox: {
            VectorH v(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const double lo = op.box_lo()[i], hi = op.box_hi()[i];
                if (lo == hi) {
                    v[i] = target[i];  // cone is all of R
                } else if (x[i] <= lo) {
                    v[i] = std::min(target[i], 0.0);
                } else if (x[i] >= hi) {
                    v[i] = std::max(target[i], 0.0);
                } else {
                    v[i] = 0.0;
                }
            }
            return v;
        }
        case OperatorKind::NormalConeHalfspace: {
            const VectorH& a = op.halfspace_normal();
            const double s = (a.dot(x) - op.halfspace_offset()) / a.norm();
            if (s < -1e-12 * (1.0 + x.norm())) return VectorH::Zero(x.size());
            const double t = std::max(target.dot(a) / a.squaredNorm(), 0.0);
            return t * a;
        }
        case OperatorKind::NormalConeAffine:
            // value set is range(C^T) at every feasible point
            return op.equality_solver().solve(op.matrix() * target);
        case OperatorKind::SumShift:
            return value_projection(op.inner_op(), x, target - op.shift()) + op.shift();
        default:
            return op.evaluate(x);
    }
}

}  // namespace

std::optional<VectorH> min_norm_value(const OperatorSpec& op, const VectorH& x) {
    require_dim(op, x, "min_norm_value");
    if (domain_distance(op, x) > 1e-12 * (1.0 + x.norm())) return std::nullopt;
    return value_projection(op, x, VectorH::Zero(x.size()));
}

}  // namespace drsplit
