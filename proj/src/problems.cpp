#include "drsplit/problems.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "drsplit/errors.hpp"
#include "drsplit/rng.hpp"

namespace drsplit {

namespace {

std::uint64_t mix_seed(Eigen::Index n, std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t h = seed ^ (0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(n) + 1));
    h ^= salt + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return h;
}

Eigen::MatrixXd gaussian_matrix(Rng& rng, Eigen::Index n, double scale) {
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = scale * rng.normal();
    }
    return m;
}

void verify_known_solution(const ProblemInstance& prob) {
    if (!prob.known_solution) return;
    const double res = solution_residual(prob.A, prob.B, prob.known_solution->x,
                                         prob.known_solution->b);
    if (res > 1e-9) {
        throw GenerationError(prob.name + ": generated solution fails verification "
                              "(residual " + std::to_string(res) + ")");
    }
}

}  // namespace

ProblemInstance make_affine_pair(Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw UsageError("make_affine_pair: n must be >= 1");
    Rng rng(mix_seed(n, seed, 0xA001));
    const double spread = 0.3 / std::sqrt(static_cast<double>(n));

    for (int attempt = 0; attempt < 10; ++attempt) {
        Eigen::MatrixXd m[2];
        for (int i = 0; i < 2; ++i) {
            Eigen::MatrixXd r =
                Eigen::MatrixXd::Identity(n, n) + gaussian_matrix(rng, n, spread);
            m[i] = r.transpose() * r;
            const bool use_skew = rng.uniform01() < 0.5;
            if (use_skew && n > 1) {
                Eigen::MatrixXd g = gaussian_matrix(rng, n, spread);
                m[i] += g - g.transpose();
            }
        }
        const Eigen::MatrixXd sum = m[0] + m[1];
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sum);
        if (!lu.isInvertible()) continue;

        const VectorH x_sol = rng.gaussian(n);
        const VectorH q1 = rng.gaussian(n);
        const VectorH q2 = -(sum * x_sol) - q1;

        ProblemInstance prob;
        prob.name = "affine_pair_n" + std::to_string(n) + "_s" + std::to_string(seed);
        prob.A = OperatorSpec::affine_monotone(m[0], q1);
        prob.B = OperatorSpec::affine_monotone(m[1], q2);
        prob.dim = n;
        prob.x0 = rng.gaussian(n);
        prob.known_solution = SolutionPair{x_sol, m[1] * x_sol + q2};
        prob.notes = "solution pre-drawn; offsets solve (M1 + M2) x = -(q1 + q2)";
        verify_known_solution(prob);
        return prob;
    }
    throw GenerationError("make_affine_pair: singular M1 + M2 after 10 redraws");
}

ProblemInstance make_feasibility(Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw UsageError("make_feasibility: n must be >= 1");
    Rng rng(mix_seed(n, seed, 0xF001));

    VectorH lo1(n), hi1(n), lo2(n), hi2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double center = rng.uniform(-1.0, 1.0);
        const double width = 0.1 + 0.9 * rng.uniform01();  // overlap width >= 0.1
        const double overlap_lo = center - width / 2.0;
        const double overlap_hi = center + width / 2.0;
        lo1[i] = overlap_lo - rng.uniform01();
        hi1[i] = overlap_hi + rng.uniform01();
        lo2[i] = overlap_lo - rng.uniform01();
        hi2[i] = overlap_hi + rng.uniform01();
    }
    const VectorH inter_lo = lo1.cwiseMax(lo2);
    const VectorH inter_hi = hi1.cwiseMin(hi2);

    ProblemInstance prob;
    prob.name = "feasibility_n" + std::to_string(n) + "_s" + std::to_string(seed);
    prob.A = OperatorSpec::normal_cone_box(lo1, hi1);
    prob.B = OperatorSpec::normal_cone_box(lo2, hi2);
    prob.dim = n;
    prob.x0 = (1.5 * rng.gaussian(n)).cwiseMax(lo2).cwiseMin(hi2);
    prob.known_solution = SolutionPair{(inter_lo + inter_hi) / 2.0, VectorH::Zero(n)};
    prob.notes = "b = 0 valid since the box intersection has nonempty interior";
    verify_known_solution(prob);
    return prob;
}

ProblemInstance make_l1_quadratic(Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw UsageError("make_l1_quadratic: n must be >= 1");
    Rng rng(mix_seed(n, seed, 0x1101));

    const double w = 0.5 + rng.uniform01();
    VectorH c(n), x_sol(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        c[i] = 2.0 * w * rng.normal();  // mixes thresholded and surviving coordinates
        const double mag = std::abs(c[i]) - w;
        x_sol[i] = mag > 0.0 ? (c[i] > 0.0 ? mag : -mag) : 0.0;
    }

    ProblemInstance prob;
    prob.name = "l1_quadratic_n" + std::to_string(n) + "_s" + std::to_string(seed);
    prob.A = OperatorSpec::subdiff_l1(w);
    prob.B = OperatorSpec::quadratic_gradient(Eigen::MatrixXd::Identity(n, n), c);
    prob.dim = n;
    prob.x0 = rng.gaussian(n);
    prob.known_solution = SolutionPair{x_sol, x_sol - c};
    prob.notes = "componentwise soft threshold of c at weight w = " + std::to_string(w);
    verify_known_solution(prob);
    return prob;
}

ProblemInstance affine_1d_fixture() {
    ProblemInstance prob;
    prob.name = "affine_1d";
    prob.A = OperatorSpec::affine_monotone(Eigen::MatrixXd::Identity(1, 1),
                                           VectorH::Zero(1));
    prob.B = OperatorSpec::affine_monotone(Eigen::MatrixXd::Identity(1, 1),
                                           VectorH::Constant(1, -1.0));
    prob.dim = 1;
    prob.x0 = VectorH::Zero(1);
    VectorH x_sol = VectorH::Constant(1, 0.5);
    VectorH b_sol = VectorH::Constant(1, -0.5);
    prob.known_solution = SolutionPair{x_sol, b_sol};
    prob.notes = "closed form: 2x - 1 = 0";
    verify_known_solution(prob);
    return prob;
}

}  // namespace drsplit
