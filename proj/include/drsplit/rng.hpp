#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "drsplit/hilbert.hpp"

namespace drsplit {

/// Seedable generator with portable output. Raw bits come from
/// std::mt19937_64 (bit-exact on every platform); all distribution
/// transforms are done here rather than through std:: distributions, whose
/// output is implementation-defined. The same seed therefore reproduces a
/// trace bit-for-bit on one platform and to libm rounding across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe as a log argument.
    double uniform01_open() {
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (no cached spare).
    double normal() {
        const double u = uniform01_open();
        const double v = uniform01();
        return std::sqrt(-2.0 * std::log(u)) *
               std::cos(6.28318530717958647692528676655900577 * v);
    }

    VectorH gaussian(Eigen::Index n) {
        VectorH g(n);
        for (Eigen::Index i = 0; i < n; ++i) g[i] = normal();
        return g;
    }

    /// Uniform draw from the closed ball of the given radius.
    VectorH in_ball(Eigen::Index n, double radius) {
        VectorH g = gaussian(n);
        const double u = uniform01();
        const double norm = g.norm();
        if (norm == 0.0 || radius <= 0.0) return VectorH::Zero(n);
        const double r = radius * std::pow(u, 1.0 / static_cast<double>(n));
        return g * (r / norm);
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace drsplit
