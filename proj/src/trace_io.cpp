#include "drsplit/trace_io.hpp"

#include <cstdio>
#include <fstream>

#include "drsplit/errors.hpp"

namespace drsplit {

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

static std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps line endings platform-stable
    if (!out) throw UsageError("cannot open for writing: " + path);
    return out;
}

void write_trace_csv(const std::string& path, const Trace& trace,
                     const std::optional<SolutionPair>& known_solution) {
    std::ofstream out = open_for_write(path);
    out << "k,alpha_k,beta_k,res_s1,res_s2,res_primal,res_dual,shadow_z_norm,"
           "dist_to_solution\n";
    for (const IterateRecord& r : trace.records) {
        out << r.k << ',' << format_g17(r.alpha) << ',' << format_g17(r.beta) << ','
            << format_g17(r.res_s1) << ',' << format_g17(r.res_s2) << ','
            << format_g17(r.res_primal) << ',' << format_g17(r.res_dual) << ','
            << format_g17(r.shadow_z.norm()) << ',';
        if (known_solution) {
            const PairPoint sol{known_solution->x, known_solution->b, trace.lambda};
            out << format_g17(lambda_norm(trace.p(r.k) - sol));
        }
        out << '\n';
    }
}

void write_checks_csv(const std::string& path, std::span<const CheckReport> reports) {
    std::ofstream out = open_for_write(path);
    out << "name,k,lhs,rhs,margin,passed\n";
    for (const CheckReport& r : reports) {
        out << r.name << ',';
        if (r.k >= 0) out << r.k;
        out << ',' << format_g17(r.lhs) << ',' << format_g17(r.rhs) << ','
            << format_g17(r.margin) << ',' << (r.passed ? "true" : "false") << '\n';
    }
}

}  // namespace drsplit
