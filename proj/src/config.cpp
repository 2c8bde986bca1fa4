#include "drsplit/config.hpp"

#include <algorithm>
#include <fstream>

#include "drsplit/errors.hpp"

namespace drsplit {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& why) {
    throw ConfigError("config key '" + key + "': " + why);
}

const json& require(const json& j, const std::string& key, const std::string& context) {
    if (!j.is_object()) fail(context, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(context.empty() ? key : context + "." + key, "missing");
    return *it;
}

std::string join_key(const std::string& context, const std::string& key) {
    return context.empty() ? key : context + "." + key;
}

double get_number(const json& j, const std::string& key) {
    if (!j.is_number()) fail(key, "expected a number");
    return j.get<double>();
}

VectorH get_vector(const json& j, const std::string& key) {
    if (!j.is_array()) fail(key, "expected an array of numbers");
    VectorH v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(key, "expected a number at index " + std::to_string(i));
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Eigen::MatrixXd get_matrix(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) fail(key, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) fail(key, "expected rows to be non-empty arrays");
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) {
            fail(key, "row " + std::to_string(r) + " has inconsistent length");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) fail(key, "expected numbers");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                j[r][c].get<double>();
        }
    }
    return m;
}

json vector_to_json(const VectorH& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

ScheduleSpec schedule_spec_from_json(const json& j, const std::string& context) {
    const std::string kind = require(j, "kind", context).get<std::string>();
    try {
        if (kind == "geometric") {
            return ScheduleSpec::geometric(get_number(require(j, "c", context), join_key(context, "c")),
                                           get_number(require(j, "rho", context), join_key(context, "rho")));
        }
        if (kind == "power") {
            return ScheduleSpec::power(get_number(require(j, "c", context), join_key(context, "c")),
                                       get_number(require(j, "p", context), join_key(context, "p")));
        }
        if (kind == "zero") return ScheduleSpec::zero();
    } catch (const UsageError& e) {
        fail(context, e.what());
    }
    fail(join_key(context, "kind"), "unknown schedule kind '" + kind + "'");
}

json schedule_spec_to_json(const ScheduleSpec& s) {
    switch (s.kind) {
        case ScheduleSpec::Kind::Geometric:
            return {{"kind", "geometric"}, {"c", s.c}, {"rho", s.rho}};
        case ScheduleSpec::Kind::Power:
            return {{"kind", "power"}, {"c", s.c}, {"p", s.p}};
        case ScheduleSpec::Kind::Zero:
            return {{"kind", "zero"}};
    }
    return {{"kind", "zero"}};
}

}  // namespace

ErrorSchedule schedule_from_json(const json& j, const std::string& context) {
    if (j.contains("alpha") || j.contains("beta")) {
        ErrorSchedule s;
        s.alpha = schedule_spec_from_json(require(j, "alpha", context), join_key(context, "alpha"));
        s.beta = schedule_spec_from_json(require(j, "beta", context), join_key(context, "beta"));
        return s;
    }
    return ErrorSchedule::same(schedule_spec_from_json(j, context));
}

json schedule_to_json(const ErrorSchedule& s) {
    return {{"alpha", schedule_spec_to_json(s.alpha)}, {"beta", schedule_spec_to_json(s.beta)}};
}

OperatorSpec operator_from_json(const json& j, const std::string& context) {
    const std::string kind = require(j, "kind", context).get<std::string>();
    try {
        if (kind == "affine_monotone") {
            return OperatorSpec::affine_monotone(
                get_matrix(require(j, "M", context), join_key(context, "M")),
                get_vector(require(j, "q", context), join_key(context, "q")));
        }
        if (kind == "subdiff_l1") {
            return OperatorSpec::subdiff_l1(
                get_number(require(j, "weight", context), join_key(context, "weight")));
        }
        if (kind == "normal_cone_box") {
            return OperatorSpec::normal_cone_box(
                get_vector(require(j, "lo", context), join_key(context, "lo")),
                get_vector(require(j, "hi", context), join_key(context, "hi")));
        }
        if (kind == "normal_cone_halfspace") {
            return OperatorSpec::normal_cone_halfspace(
                get_vector(require(j, "normal", context), join_key(context, "normal")),
                get_number(require(j, "offset", context), join_key(context, "offset")));
        }
        if (kind == "normal_cone_affine") {
            return OperatorSpec::normal_cone_affine(
                get_matrix(require(j, "C", context), join_key(context, "C")),
                get_vector(require(j, "d", context), join_key(context, "d")));
        }
        if (kind == "quadratic_gradient") {
            return OperatorSpec::quadratic_gradient(
                get_matrix(require(j, "Q", context), join_key(context, "Q")),
                get_vector(require(j, "c", context), join_key(context, "c")));
        }
        if (kind == "scaled_identity") {
            return OperatorSpec::scaled_identity(
                get_number(require(j, "weight", context), join_key(context, "weight")));
        }
        if (kind == "zero") return OperatorSpec::zero();
        if (kind == "sum_shift") {
            return OperatorSpec::sum_shift(
                operator_from_json(require(j, "inner", context), join_key(context, "inner")),
                get_vector(require(j, "c", context), join_key(context, "c")));
        }
    } catch (const UsageError& e) {
        fail(context, e.what());
    }
    fail(join_key(context, "kind"), "unknown operator kind '" + kind + "'");
}

json operator_to_json(const OperatorSpec& op) {
    json j{{"kind", to_string(op.kind())}};
    switch (op.kind()) {
        case OperatorKind::AffineMonotone:
            j["M"] = matrix_to_json(op.matrix());
            j["q"] = vector_to_json(op.offset_vector());
            break;
        case OperatorKind::SubdiffL1:
            j["weight"] = op.weight();
            break;
        case OperatorKind::NormalConeBox:
            j["lo"] = vector_to_json(op.box_lo());
            j["hi"] = vector_to_json(op.box_hi());
            break;
        case OperatorKind::NormalConeHalfspace:
            j["normal"] = vector_to_json(op.halfspace_normal());
            j["offset"] = op.halfspace_offset();
            break;
        case OperatorKind::NormalConeAffine:
            j["C"] = matrix_to_json(op.matrix());
            j["d"] = vector_to_json(op.offset_vector());
            break;
        case OperatorKind::QuadraticGradient:
            j["Q"] = matrix_to_json(op.matrix());
            j["c"] = vector_to_json(op.center());
            break;
        case OperatorKind::ScaledIdentity:
            j["weight"] = op.weight();
            break;
        case OperatorKind::Zero:
            break;
        case OperatorKind::SumShift:
            j["inner"] = operator_to_json(op.inner_op());
            j["c"] = vector_to_json(op.shift());
            break;
    }
    return j;
}

const std::vector<std::string>& known_check_names() {
    static const std::vector<std::string> names = {
        "membership",   "identities", "inexactness", "fejer_descent", "quasi_fejer",
        "summability",  "residuals",  "shadow",      "solution_residual",
        "graph_closure",
    };
    return names;
}

namespace {

ProblemInstance problem_from_json(const json& j) {
    if (j.contains("generator")) {
        const std::string family = require(j, "generator", "problem").get<std::string>();
        if (family == "affine_1d") return affine_1d_fixture();
        const auto n = static_cast<Eigen::Index>(
            get_number(require(j, "n", "problem"), "problem.n"));
        const auto seed = static_cast<std::uint64_t>(
            get_number(require(j, "seed", "problem"), "problem.seed"));
        if (n < 1) fail("problem.n", "must be >= 1");
        try {
            if (family == "affine_pair") return make_affine_pair(n, seed);
            if (family == "feasibility") return make_feasibility(n, seed);
            if (family == "l1_quadratic") return make_l1_quadratic(n, seed);
        } catch (const UsageError& e) {
            fail("problem.generator", e.what());
        }
        fail("problem.generator", "unknown generator '" + family + "'");
    }

    ProblemInstance prob;
    prob.name = j.value("name", std::string("inline"));
    prob.notes = j.value("notes", std::string());
    prob.A = operator_from_json(require(j, "A", "problem"), "problem.A");
    prob.B = operator_from_json(require(j, "B", "problem"), "problem.B");
    prob.x0 = get_vector(require(j, "x0", "problem"), "problem.x0");
    prob.dim = j.contains("dim")
                   ? static_cast<Eigen::Index>(get_number(j["dim"], "problem.dim"))
                   : prob.x0.size();
    if (prob.dim != prob.x0.size()) fail("problem.x0", "dimension does not match problem.dim");
    for (const auto* op : {&prob.A, &prob.B}) {
        if (op->dim() > 0 && op->dim() != prob.dim) {
            fail("problem", "operator dimension " + std::to_string(op->dim()) +
                                " does not match problem dimension " +
                                std::to_string(prob.dim));
        }
    }
    if (!all_finite(prob.x0)) fail("problem.x0", "entries must be finite");
    if (j.contains("known_solution")) {
        const json& sol = j["known_solution"];
        SolutionPair p;
        p.x = get_vector(require(sol, "x", "problem.known_solution"),
                         "problem.known_solution.x");
        p.b = get_vector(require(sol, "b", "problem.known_solution"),
                         "problem.known_solution.b");
        const double res = solution_residual(prob.A, prob.B, p.x, p.b);
        if (res > 1e-9) {
            fail("problem.known_solution",
                 "fails verification (solution residual " + std::to_string(res) + ")");
        }
        prob.known_solution = std::move(p);
    }
    return prob;
}

SolverConfig solver_from_json(const json& j) {
    SolverConfig cfg;
    if (j.contains("lambda")) cfg.lambda = get_number(j["lambda"], "solver.lambda");
    if (j.contains("schedule")) cfg.schedule = schedule_from_json(j["schedule"], "solver.schedule");
    if (j.contains("max_iter")) {
        cfg.max_iter = static_cast<int>(get_number(j["max_iter"], "solver.max_iter"));
    }
    if (j.contains("stop_tol")) cfg.stop_tol = get_number(j["stop_tol"], "solver.stop_tol");
    if (j.contains("inexactness_mode")) {
        try {
            cfg.mode = inexactness_mode_from_string(j["inexactness_mode"].get<std::string>());
        } catch (const UsageError& e) {
            fail("solver.inexactness_mode", e.what());
        }
    }
    if (j.contains("seed")) {
        cfg.seed = static_cast<std::uint64_t>(get_number(j["seed"], "solver.seed"));
    }
    try {
        cfg.validate();
    } catch (const UsageError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

std::vector<std::string> checks_from_json(const json& j) {
    if (!j.is_array()) fail("checks", "expected an array of check names");
    std::vector<std::string> out;
    for (const auto& item : j) {
        const std::string name = item.get<std::string>();
        if (name == "all") {
            return known_check_names();
        }
        const auto& known = known_check_names();
        if (std::find(known.begin(), known.end(), name) == known.end()) {
            fail("checks", "unknown check name '" + name + "'");
        }
        out.push_back(name);
    }
    return out;
}

SweepGrid sweep_from_json(const json& j) {
    SweepGrid grid;
    if (j.contains("lambda")) {
        for (const auto& v : j["lambda"]) {
            grid.lambdas.push_back(get_number(v, "sweep.lambda"));
        }
    }
    if (j.contains("schedule")) {
        for (const auto& s : j["schedule"]) {
            grid.schedules.push_back(schedule_from_json(s, "sweep.schedule"));
        }
    }
    if (j.contains("seeds")) {
        for (const auto& v : j["seeds"]) {
            grid.seeds.push_back(static_cast<std::uint64_t>(get_number(v, "sweep.seeds")));
        }
    }
    return grid;
}

}  // namespace

json problem_to_json(const ProblemInstance& p) {
    json j{{"name", p.name},
           {"dim", p.dim},
           {"A", operator_to_json(p.A)},
           {"B", operator_to_json(p.B)},
           {"x0", vector_to_json(p.x0)}};
    if (!p.notes.empty()) j["notes"] = p.notes;
    if (p.known_solution) {
        j["known_solution"] = {{"x", vector_to_json(p.known_solution->x)},
                               {"b", vector_to_json(p.known_solution->b)}};
    }
    return j;
}

json solver_to_json(const SolverConfig& s) {
    return {{"lambda", s.lambda},       {"schedule", schedule_to_json(s.schedule)},
            {"max_iter", s.max_iter},   {"stop_tol", s.stop_tol},
            {"inexactness_mode", to_string(s.mode)},
            {"seed", s.seed}};
}

json RunConfig::effective() const {
    json j{{"problem", problem_to_json(problem)},
           {"solver", solver_to_json(solver)},
           {"checks", checks},
           {"output_dir", output_dir},
           {"emit_plots", emit_plots}};
    if (sweep) {
        json grid;
        grid["lambda"] = sweep->lambdas;
        grid["schedule"] = json::array();
        for (const auto& s : sweep->schedules) grid["schedule"].push_back(schedule_to_json(s));
        grid["seeds"] = sweep->seeds;
        j["sweep"] = grid;
    }
    return j;
}

RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    RunConfig cfg;
    cfg.problem = problem_from_json(require(j, "problem", ""));
    cfg.solver = j.contains("solver") ? solver_from_json(j["solver"]) : SolverConfig{};
    cfg.checks = j.contains("checks") ? checks_from_json(j["checks"]) : known_check_names();
    cfg.output_dir = j.value("output_dir", std::string());
    cfg.emit_plots = j.value("emit_plots", false);
    if (j.contains("sweep")) cfg.sweep = sweep_from_json(j["sweep"]);
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return parse_run_config(j);
}

}  // namespace drsplit
