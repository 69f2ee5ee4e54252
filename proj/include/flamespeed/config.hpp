// Run configuration for the command-line front end.
//
// A config is a JSON document.  Every section is optional; unknown keys are rejected.
//
//   {
//     "flow":      {"preset": "single-well"}  or  {"cos": [...], "sin": [...], "offset": 0},
//     "momentum":  {"gamma": 1, "mu": 0.1},
//     "solver":    {"d": 1, "d_schedule": [4, 2, 1], "grid_n": 0, "tol": 1e-11, "max_iters": 50},
//     "output":    {"dir": "out"},
//     "seed":      20240601,
//     "selection": {"d_values": [0.1, 0.01, 0.001], "slope_d_values": [0.004, 0.002, 0.001]},
//     "inequalities": {"discrete_cases": 1000, "continuous_cases": 200},
//     "perturb":   {"field_file": "v.txt", "direction": [0.6, 0.8], "d": 1, "delta": 0.01,
//                   "d_grid": [0.25, 0.5, 1, 2], "cross_check_deltas": [0.02, 0.01],
//                   "random": {"dim": 3, "kmax": 4, "decay": 1.5}},
//     "hj":        {"p": 0.3, "d_values": [2, 1, 0.5], "hamiltonian": "quadratic"}
//   }
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "flamespeed/cell_solver.hpp"
#include "flamespeed/flow_model.hpp"
#include "flamespeed/problem.hpp"

namespace flamespeed {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RandomFieldConfig {
    int dim = 3;
    int kmax = 4;
    double decay = 1.5;
};

struct PerturbConfig {
    std::optional<std::string> field_file;      // resolved against the config file's directory
    std::optional<RandomFieldConfig> random;    // used when no field file is given
    std::vector<double> direction;              // empty: (gamma, mu) of the momentum section
    double d = 1.0;
    double delta = 0.01;
    std::vector<double> d_grid;
    std::vector<double> cross_check_deltas;     // shear flows only
};

struct HJConfig {
    double p = 0.3;
    std::vector<double> d_values{2.0, 1.0, 0.5};
    std::string hamiltonian = "quadratic";      // or "nonconvex"
};

struct RunConfig {
    FlowSpec flow = flow_preset("single-well");
    Momentum momentum{1.0, 0.1};
    double d = 1.0;
    std::vector<double> d_schedule{4, 2, 1, 0.5, 0.25, 0.1};
    int grid_n = 0;                             // 0: chosen per d
    SolverOptions solver;
    std::string output_dir;                     // empty: FLAMESPEED_OUT, then "flamespeed_out"
    std::uint64_t seed = 20240601;
    std::vector<double> selection_d{1e-1, 1e-2, 1e-3};
    std::vector<double> slope_d{4e-3, 2e-3, 1e-3};
    int discrete_cases = 1000;
    int continuous_cases = 200;
    PerturbConfig perturb;
    HJConfig hj;
};

/// Throws ConfigError with the offending key.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Checks the cross-field invariants (positive d values, power-of-two grid, ...).
void validate(const RunConfig& cfg);

FlowSpec parse_flow(const nlohmann::json& j);
nlohmann::json flow_to_json(const FlowSpec& f);

}  // namespace flamespeed
