#pragma once

#include <utility>

namespace drsplit {

/// One summable tolerance sequence. Admissible shapes:
///   geometric(c, rho): value(k) = c * rho^k       (c >= 0, 0 <= rho < 1)
///   power(c, p):       value(k) = c * k^(-p)      (c >= 0, p > 1)
///   zero:              value(k) = 0
/// Each shape comes with a closed-form bound on its total sum, so
/// summability is certified at construction rather than assumed.
struct ScheduleSpec {
    enum class Kind { Geometric, Power, Zero };

    Kind kind = Kind::Zero;
    double c = 0.0;
    double rho = 0.0;  // geometric ratio
    double p = 0.0;    // power exponent

    static ScheduleSpec geometric(double c, double rho);
    static ScheduleSpec power(double c, double p);
    static ScheduleSpec zero();

    /// k-th tolerance, k >= 1.
    double value(int k) const;

    /// Closed-form upper bound on sum_{k>=1} value(k), the summability
    /// certificate.
    double total_bound() const;
};

/// The pair of tolerance sequences {alpha_k}, {beta_k}; either shared shape
/// or two independent shapes.
struct ErrorSchedule {
    ScheduleSpec alpha;
    ScheduleSpec beta;

    static ErrorSchedule same(ScheduleSpec s) { return {s, s}; }
    static ErrorSchedule geometric(double c, double rho) {
        return same(ScheduleSpec::geometric(c, rho));
    }
    static ErrorSchedule power(double c, double p) {
        return same(ScheduleSpec::power(c, p));
    }
    static ErrorSchedule zero() { return same(ScheduleSpec::zero()); }

    double total_bound() const { return alpha.total_bound() + beta.total_bound(); }
};

/// (alpha_k, beta_k) for iteration k >= 1. Throws UsageError for k < 1.
std::pair<double, double> schedule_values(const ErrorSchedule& schedule, int k);

}  // namespace drsplit
