#include "flamespeed/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "flamespeed/grid.hpp"

namespace flamespeed {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + ": not finite");
    return x;
}

int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return j.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

FlowSpec parse_flow(const json& j) {
    only_keys(j, "flow", {"preset", "cos", "sin", "offset"});
    if (j.contains("preset")) {
        if (j.size() != 1) throw ConfigError("flow: 'preset' cannot be combined with coefficients");
        if (!j["preset"].is_string()) throw ConfigError("flow.preset: expected a string");
        try {
            return flow_preset(j["preset"].get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("flow.preset: ") + e.what());
        }
    }
    FlowSpec f;
    if (j.contains("cos")) f.cosine = numbers(j["cos"], "flow.cos");
    if (j.contains("sin")) f.sine = numbers(j["sin"], "flow.sin");
    if (j.contains("offset")) f.offset = number(j["offset"], "flow.offset");
    return f;
}

json flow_to_json(const FlowSpec& f) {
    json j;
    if (f.preset_name) j["preset"] = *f.preset_name;
    j["cos"] = f.cosine;
    j["sin"] = f.sine;
    j["offset"] = f.offset;
    return j;
}

RunConfig parse_config(const json& doc, const std::string& base_dir) {
    only_keys(doc, "config",
              {"flow", "momentum", "solver", "output", "seed", "selection", "inequalities", "perturb", "hj"});
    RunConfig c;
    if (doc.contains("flow")) c.flow = parse_flow(doc["flow"]);
    if (doc.contains("momentum")) {
        const json& m = doc["momentum"];
        only_keys(m, "momentum", {"gamma", "mu"});
        if (m.contains("gamma")) c.momentum.gamma = number(m["gamma"], "momentum.gamma");
        if (m.contains("mu")) c.momentum.mu = number(m["mu"], "momentum.mu");
    }
    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        only_keys(s, "solver", {"d", "d_schedule", "grid_n", "tol", "max_iters"});
        if (s.contains("d")) c.d = number(s["d"], "solver.d");
        if (s.contains("d_schedule")) c.d_schedule = numbers(s["d_schedule"], "solver.d_schedule");
        if (s.contains("grid_n")) c.grid_n = integer(s["grid_n"], "solver.grid_n");
        if (s.contains("tol")) c.solver.tol = number(s["tol"], "solver.tol");
        if (s.contains("max_iters")) c.solver.max_iters = integer(s["max_iters"], "solver.max_iters");
    }
    if (doc.contains("output")) {
        only_keys(doc["output"], "output", {"dir"});
        if (doc["output"].contains("dir")) {
            if (!doc["output"]["dir"].is_string()) throw ConfigError("output.dir: expected a string");
            c.output_dir = doc["output"]["dir"].get<std::string>();
        }
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("selection")) {
        const json& s = doc["selection"];
        only_keys(s, "selection", {"d_values", "slope_d_values"});
        if (s.contains("d_values")) c.selection_d = numbers(s["d_values"], "selection.d_values");
        if (s.contains("slope_d_values")) c.slope_d = numbers(s["slope_d_values"], "selection.slope_d_values");
    }
    if (doc.contains("inequalities")) {
        const json& s = doc["inequalities"];
        only_keys(s, "inequalities", {"discrete_cases", "continuous_cases"});
        if (s.contains("discrete_cases")) c.discrete_cases = integer(s["discrete_cases"], "inequalities.discrete_cases");
        if (s.contains("continuous_cases"))
            c.continuous_cases = integer(s["continuous_cases"], "inequalities.continuous_cases");
    }
    if (doc.contains("perturb")) {
        const json& s = doc["perturb"];
        only_keys(s, "perturb", {"field_file", "random", "direction", "d", "delta", "d_grid", "cross_check_deltas"});
        PerturbConfig& p = c.perturb;
        if (s.contains("field_file")) {
            if (!s["field_file"].is_string()) throw ConfigError("perturb.field_file: expected a string");
            std::filesystem::path f = s["field_file"].get<std::string>();
            if (f.is_relative()) f = std::filesystem::path(base_dir) / f;
            p.field_file = f.lexically_normal().string();
        }
        if (s.contains("random")) {
            const json& r = s["random"];
            only_keys(r, "perturb.random", {"dim", "kmax", "decay"});
            RandomFieldConfig rc;
            if (r.contains("dim")) rc.dim = integer(r["dim"], "perturb.random.dim");
            if (r.contains("kmax")) rc.kmax = integer(r["kmax"], "perturb.random.kmax");
            if (r.contains("decay")) rc.decay = number(r["decay"], "perturb.random.decay");
            p.random = rc;
        }
        if (s.contains("direction")) p.direction = numbers(s["direction"], "perturb.direction");
        if (s.contains("d")) p.d = number(s["d"], "perturb.d");
        if (s.contains("delta")) p.delta = number(s["delta"], "perturb.delta");
        if (s.contains("d_grid")) p.d_grid = numbers(s["d_grid"], "perturb.d_grid");
        if (s.contains("cross_check_deltas"))
            p.cross_check_deltas = numbers(s["cross_check_deltas"], "perturb.cross_check_deltas");
    }
    if (doc.contains("hj")) {
        const json& s = doc["hj"];
        only_keys(s, "hj", {"p", "d_values", "hamiltonian"});
        if (s.contains("p")) c.hj.p = number(s["p"], "hj.p");
        if (s.contains("d_values")) c.hj.d_values = numbers(s["d_values"], "hj.d_values");
        if (s.contains("hamiltonian")) {
            if (!s["hamiltonian"].is_string()) throw ConfigError("hj.hamiltonian: expected a string");
            c.hj.hamiltonian = s["hamiltonian"].get<std::string>();
        }
    }
    validate(c);
    return c;
}

void validate(const RunConfig& c) {
    auto positive = [](const std::vector<double>& v, const std::string& name, bool allow_empty) {
        if (v.empty() && !allow_empty) throw ConfigError(name + ": must not be empty");
        for (double x : v)
            if (!(x > 0)) throw ConfigError(name + ": values must be positive");
    };
    if (c.momentum.gamma == 0 && c.momentum.mu == 0) throw ConfigError("momentum: p must be nonzero");
    if (!(c.d > 0)) throw ConfigError("solver.d: must be positive");
    positive(c.d_schedule, "solver.d_schedule", false);
    if (c.grid_n != 0 && (c.grid_n < 64 || !grid::is_pow2(c.grid_n)))
        throw ConfigError("solver.grid_n: must be 0 or a power of two >= 64");
    if (!(c.solver.tol > 0)) throw ConfigError("solver.tol: must be positive");
    if (c.solver.max_iters < 1) throw ConfigError("solver.max_iters: must be >= 1");
    positive(c.selection_d, "selection.d_values", false);
    positive(c.slope_d, "selection.slope_d_values", false);
    if (c.discrete_cases < 0 || c.continuous_cases < 0) throw ConfigError("inequalities: case counts must be >= 0");
    if (!(c.perturb.d > 0)) throw ConfigError("perturb.d: must be positive");
    positive(c.perturb.d_grid, "perturb.d_grid", true);
    if (c.perturb.random) {
        if (c.perturb.random->dim < 2) throw ConfigError("perturb.random.dim: must be >= 2");
        if (c.perturb.random->kmax < 1) throw ConfigError("perturb.random.kmax: must be >= 1");
    }
    positive(c.hj.d_values, "hj.d_values", false);
    if (c.hj.hamiltonian != "quadratic" && c.hj.hamiltonian != "nonconvex")
        throw ConfigError("hj.hamiltonian: expected \"quadratic\" or \"nonconvex\"");
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    return parse_config(doc, base.empty() ? "." : base.string());
}

}  // namespace flamespeed
