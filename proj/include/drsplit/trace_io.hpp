#pragma once

#include <optional>
#include <span>
#include <string>

#include "drsplit/diagnostics.hpp"
#include "drsplit/solver.hpp"

namespace drsplit {

/// 17 significant digits, enough to round-trip a double exactly.
std::string format_g17(double value);

/// Column contract (header mandatory, order fixed):
///   k,alpha_k,beta_k,res_s1,res_s2,res_primal,res_dual,shadow_z_norm,dist_to_solution
/// dist_to_solution is the lambda-norm distance of (x_k, b_k) to the known
/// solution, left empty when no solution is known.
void write_trace_csv(const std::string& path, const Trace& trace,
                     const std::optional<SolutionPair>& known_solution);

/// Column contract: name,k,lhs,rhs,margin,passed (k empty for whole-trace
/// checks, passed rendered as true/false).
void write_checks_csv(const std::string& path, std::span<const CheckReport> reports);

}  // namespace drsplit
