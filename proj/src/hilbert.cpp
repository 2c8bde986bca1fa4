#include "drsplit/hilbert.hpp"

#include <cmath>
#include <string>

#include "drsplit/errors.hpp"

namespace drsplit {

bool all_finite(const VectorH& v) {
    return v.allFinite();
}

static void require_same_dim(const VectorH& u, const VectorH& w, const char* where) {
    if (u.size() != w.size()) {
        throw UsageError(std::string(where) + ": dimension mismatch (" +
                         std::to_string(u.size()) + " vs " + std::to_string(w.size()) + ")");
    }
}

double inner(const VectorH& u, const VectorH& w) {
    require_same_dim(u, w, "inner");
    return u.dot(w);
}

static void require_compatible(const PairPoint& p, const PairPoint& q, const char* where) {
    require_same_dim(p.x, q.x, where);
    require_same_dim(p.v, q.v, where);
    if (p.lambda != q.lambda) {
        throw UsageError(std::string(where) + ": mixing pair spaces with different lambda (" +
                         std::to_string(p.lambda) + " vs " + std::to_string(q.lambda) + ")");
    }
}

PairPoint operator+(const PairPoint& p, const PairPoint& q) {
    require_compatible(p, q, "PairPoint+");
    return {p.x + q.x, p.v + q.v, p.lambda};
}

PairPoint operator-(const PairPoint& p, const PairPoint& q) {
    require_compatible(p, q, "PairPoint-");
    return {p.x - q.x, p.v - q.v, p.lambda};
}

double lambda_inner(const PairPoint& p, const PairPoint& q) {
    require_compatible(p, q, "lambda_inner");
    require_same_dim(p.x, p.v, "lambda_inner");
    return p.x.dot(q.x) + p.lambda * p.lambda * p.v.dot(q.v);
}

double lambda_norm(const PairPoint& p) {
    const double s = lambda_inner(p, p);
    return s > 0 ? std::sqrt(s) : 0.0;
}

}  // namespace drsplit
