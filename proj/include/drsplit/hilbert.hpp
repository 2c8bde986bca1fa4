#pragma once

#include <Eigen/Dense>

namespace drsplit {

/// A point of the space H = R^n. Value-semantic; all arithmetic returns
/// fresh vectors.
using VectorH = Eigen::VectorXd;

bool all_finite(const VectorH& v);

/// Canonical inner product of H. Throws UsageError on dimension mismatch.
double inner(const VectorH& u, const VectorH& w);

/// An element p = (x, v) of H x H carrying the weight lambda of the run,
/// measured with <(x,v),(x',v')> = <x,x'> + lambda^2 <v,v'>.
struct PairPoint {
    VectorH x;
    VectorH v;
    double lambda = 1.0;
};

PairPoint operator+(const PairPoint& p, const PairPoint& q);
PairPoint operator-(const PairPoint& p, const PairPoint& q);

/// Weighted inner product on H x H. Both points must carry the same lambda.
double lambda_inner(const PairPoint& p, const PairPoint& q);

/// Norm induced by lambda_inner.
double lambda_norm(const PairPoint& p);

}  // namespace drsplit
