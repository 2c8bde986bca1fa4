#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "drsplit/diagnostics.hpp"
#include "drsplit/operators.hpp"

namespace drsplit {

/// A desk-scale test instance. When known_solution is present it has been
/// verified at generation time (solution residual <= 1e-9) and notes record
/// where it comes from.
struct ProblemInstance {
    std::string name;
    OperatorSpec A;
    OperatorSpec B;
    Eigen::Index dim = 0;
    VectorH x0;
    std::optional<SolutionPair> known_solution;
    std::string notes;
};

/// Affine pair A(x) = M1 x + q1, B(x) = M2 x + q2 with M_i = R_i^T R_i plus
/// an optional skew part, and offsets chosen so a pre-drawn point solves
/// (M1 + M2) x = -(q1 + q2). The R_i are drawn near the identity, which keeps
/// the instances well conditioned for any seed. The skew parts put the
/// fixtures outside the subdifferential world on purpose.
ProblemInstance make_affine_pair(Eigen::Index n, std::uint64_t seed);

/// Two boxes with componentwise overlap of width >= 0.1; both operators are
/// normal cones, the known solution is the intersection midpoint with b = 0.
ProblemInstance make_feasibility(Eigen::Index n, std::uint64_t seed);

/// A = w * subdiff of the l1 norm, B(x) = x - c; the solution is the
/// componentwise soft threshold of c at w.
ProblemInstance make_l1_quadratic(Eigen::Index n, std::uint64_t seed);

/// The 1-D fixture A(x) = x, B(x) = x - 1 with solution (0.5, -0.5),
/// starting from x0 = 0.
ProblemInstance affine_1d_fixture();

}  // namespace drsplit
