#include "drsplit/schedule.hpp"

#include <cmath>
#include <string>

#include "drsplit/errors.hpp"

namespace drsplit {

ScheduleSpec ScheduleSpec::geometric(double c, double rho) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
        throw UsageError("schedule: geometric c must be >= 0");
    }
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw UsageError("schedule: geometric rho must satisfy 0 <= rho < 1");
    }
    ScheduleSpec s;
    s.kind = Kind::Geometric;
    s.c = c;
    s.rho = rho;
    return s;
}

ScheduleSpec ScheduleSpec::power(double c, double p) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
        throw UsageError("schedule: power c must be >= 0");
    }
    if (!(p > 1.0)) {
        throw UsageError("schedule: power exponent must be > 1 for summability");
    }
    ScheduleSpec s;
    s.kind = Kind::Power;
    s.c = c;
    s.p = p;
    return s;
}

ScheduleSpec ScheduleSpec::zero() {
    return ScheduleSpec{};
}

double ScheduleSpec::value(int k) const {
    if (k < 1) throw UsageError("schedule: index k must be >= 1 (got " + std::to_string(k) + ")");
    switch (kind) {
        case Kind::Geometric: return c * std::pow(rho, k);
        case Kind::Power: return c * std::pow(static_cast<double>(k), -p);
        case Kind::Zero: return 0.0;
    }
    return 0.0;
}

double ScheduleSpec::total_bound() const {
    switch (kind) {
        case Kind::Geometric: return rho < 1.0 ? c * rho / (1.0 - rho) : 0.0;
        // sum k^-p <= 1 + integral_1^inf t^-p dt = 1 + 1/(p-1)
        case Kind::Power: return c * (1.0 + 1.0 / (p - 1.0));
        case Kind::Zero: return 0.0;
    }
    return 0.0;
}

std::pair<double, double> schedule_values(const ErrorSchedule& schedule, int k) {
    return {schedule.alpha.value(k), schedule.beta.value(k)};
}

}  // namespace drsplit
