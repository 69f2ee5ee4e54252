#include "flamespeed/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "flamespeed/cell_solver.hpp"
#include "flamespeed/inequalities.hpp"
#include "flamespeed/inviscid.hpp"
#include "flamespeed/io.hpp"
#include "flamespeed/perturbation.hpp"
#include "flamespeed/selection.hpp"
#include "flamespeed/viscous_hj.hpp"

namespace flamespeed {

using nlohmann::json;

namespace {

// raised for inconsistent option combinations discovered while running
struct UsageError : ConfigError {
    using ConfigError::ConfigError;
};

void say(const CommandContext& ctx, const std::string& msg) {
    if (ctx.log) *ctx.log << msg << '\n';
}

json momentum_json(const Momentum& p) { return {{"gamma", p.gamma}, {"mu", p.mu}}; }

json header(const char* command, const RunConfig& cfg) {
    return {{"command", command}, {"flow", flow_to_json(cfg.flow)}, {"momentum", momentum_json(cfg.momentum)}};
}

std::vector<double> grid_points(int n) {
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) x[j] = double(j) / n;
    return x;
}

// phi of the original problem from the canonical-frame solution
std::vector<double> phi_original(const CellSolution& sol, const NormalizedProblem& P) {
    std::vector<double> phi = P.to_original_frame(sol.phi);
    const double s = (P.reflected ? -1.0 : 1.0) * (P.gamma_flipped ? -1.0 : 1.0);
    for (double& x : phi) x *= s;
    return phi;
}

void write(const CommandContext& ctx, const std::string& name, const std::string& content) {
    io::write_atomic(ctx.out_dir / name, content);
    say(ctx, "wrote " + (ctx.out_dir / name).string());
}

int resolve_grid(const RunConfig& cfg, double d) { return cfg.grid_n > 0 ? cfg.grid_n : recommended_grid(d); }

}  // namespace

int cmd_solve(const RunConfig& cfg, const CommandContext& ctx) {
    const FlowProfile flow = build_flow(cfg.flow);
    const Momentum& p = cfg.momentum;
    json out = header("solve", cfg);
    out["d"] = cfg.d;
    CellSolution sol;
    if (p.gamma == 0) {
        sol = degenerate_direction_solution(p, cfg.d, resolve_grid(cfg, cfg.d));
        out["closed_form"] = true;
        out["mean_identity_residual"] = 0.0;
        out["dE_dd_formula"] = 0.0;
    } else {
        const NormalizedProblem P = normalize(flow, p);
        sol = solve_cell_continuation(P, cfg.d, cfg.grid_n, cfg.solver);
        out["closed_form"] = false;
        out["mean_identity_residual"] = mean_identity_check(sol, P);
        out["dE_dd_formula"] = alpha_from_formula(sol);
        sol.phi = phi_original(sol, P);
        sol.w = P.to_original_frame(sol.w);
    }
    out["grid_n"] = sol.grid_n;
    out["H"] = sol.H;
    out["E"] = sol.E;
    out["residual"] = sol.residual;
    out["residual_floor"] = sol.residual_floor;
    out["newton_iters"] = sol.newton_iters;
    const std::vector<double> x = grid_points(sol.grid_n);
    out["x"] = x;
    out["phi"] = sol.phi;
    out["w"] = sol.w;
    write(ctx, "solve.csv", io::csv({"x", "phi", "w"}, {x, sol.phi, sol.w}));
    write(ctx, "solve.json", io::dump_json(out));
    say(ctx, "H = " + io::format_double(sol.H));
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const CommandContext& ctx) {
    const FlowProfile flow = build_flow(cfg.flow);
    const Momentum& p = cfg.momentum;
    json out = header("sweep", cfg);
    std::vector<double> d = cfg.d_schedule;
    std::sort(d.begin(), d.end());
    const std::size_t k = d.size();
    const double large_limit = p.norm() + p.gamma * flow.mean();

    SweepResult s;
    double H0 = std::abs(p.mu);
    if (p.gamma == 0) {
        s.d_values = d;
        s.H_values.assign(k, std::abs(p.mu));
        s.E_values = s.H_values;
        s.dH_dd_fd.assign(k, 0.0);
        s.dE_dd_formula.assign(k, 0.0);
        s.residuals.assign(k, 0.0);
        s.grid_n = resolve_grid(cfg, d.front());
    } else {
        const NormalizedProblem P = normalize(flow, p);
        s = sweep_markstein(P, d, cfg.grid_n, cfg.solver);
        H0 = solve_inviscid_H(P).H0;
    }
    out["d"] = s.d_values;
    out["H"] = s.H_values;
    out["dH_dd_fd"] = s.dH_dd_fd;
    out["dE_dd_formula"] = s.dE_dd_formula;
    out["residual"] = s.residuals;
    out["grid_n"] = s.grid_n;
    out["H_large_d_limit"] = large_limit;
    out["H_inviscid"] = H0;
    out["strictly_decreasing"] = s.monotone_decreasing;

    std::string table = io::csv({"d", "H", "dH_dd_fd", "dE_dd_formula", "residual", "H_large_d_limit", "H_inviscid"},
                                {s.d_values, s.H_values, s.dH_dd_fd, s.dE_dd_formula, s.residuals,
                                 std::vector<double>(k, large_limit), std::vector<double>(k, H0)});
    table += std::string("# verdict,") + (s.monotone_decreasing ? "strictly_decreasing" : "not_strictly_decreasing") + "\n";
    write(ctx, "sweep.csv", table);
    write(ctx, "sweep.json", io::dump_json(out));
    say(ctx, std::string("verdict: ") + (s.monotone_decreasing ? "strictly decreasing" : "not strictly decreasing"));
    return kExitOk;
}

int cmd_inviscid(const RunConfig& cfg, const CommandContext& ctx) {
    if (cfg.momentum.gamma == 0) throw UsageError("inviscid: gamma = 0 has the closed form H = |mu|");
    const NormalizedProblem P = normalize(build_flow(cfg.flow), cfg.momentum);
    const InviscidResult r = enumerate_solutions(P);
    json out = header("inviscid", cfg);
    out["regime"] = to_string(r.regime);
    out["H0"] = r.H0;
    out["H0_norm"] = r.H0_norm;
    out["mu_star"] = r.mu_star;
    out["root_residual"] = r.residual;
    json branches = json::array();
    for (std::size_t i = 0; i < r.branches.size(); ++i) {
        const BranchSolution& b = r.branches[i];
        branches.push_back({{"anchor", P.x_to_original(b.anchor)},
                            {"turning_point", P.x_to_original(b.turning_point)},
                            {"equation_residual", b.equation_residual},
                            {"periodicity_defect", b.periodicity_defect},
                            {"kinks_ok", b.kinks_ok}});
        // branches are sampled on a non-uniform grid, so they are written in the canonical frame
        write(ctx, "inviscid_branch_" + std::to_string(i) + ".csv", io::csv({"x", "w", "slope"}, {b.x, b.w, b.slope}));
    }
    out["branches"] = branches;
    out["frame"] = {{"reflected", P.reflected}, {"gamma_flipped", P.gamma_flipped}, {"c_shift", P.c_shift}};
    write(ctx, "inviscid.json", io::dump_json(out));
    return kExitOk;
}

int cmd_select(const RunConfig& cfg, const CommandContext& ctx) {
    if (cfg.momentum.gamma == 0) throw UsageError("select: gamma = 0 has the closed form H = |mu|");
    const NormalizedProblem P = normalize(build_flow(cfg.flow), cfg.momentum);
    const SelectionResult sel = physical_fluctuation(P);   // throws SelectionRefused
    const InviscidResult inv = solve_inviscid_H(P);
    json out = header("select", cfg);
    out["regime"] = to_string(sel.regime);
    out["H0"] = inv.H0;

    const double d_min = *std::min_element(cfg.selection_d.begin(), cfg.selection_d.end());
    const CellSolution sol = solve_cell_continuation(P, d_min, cfg.grid_n, cfg.solver);
    const std::vector<double> xs = grid_points(sol.grid_n);
    const std::vector<double> w0 = branch_profile(P, inv, sel.x_bar, xs);
    write(ctx, "select.csv",
          io::csv({"x", "w_d", "w0_minus_w0_at_0"}, {xs, P.to_original_frame(sol.w), P.to_original_frame(w0)}));

    if (sel.regime == Regime::trapped) {
        out["x_bar"] = P.x_to_original(sel.x_bar);
        out["x_mu"] = P.x_to_original(sel.x_mu);
        out["slope_target"] = sel.slope_target;
        const SelectionCheck chk = verify_selection(P, cfg.selection_d, cfg.grid_n, cfg.solver);
        out["d_values"] = chk.d_values;
        out["distances"] = chk.distances;
        out["wrong_anchor_distances"] = chk.wrong_distances;
        out["distance_monotone"] = chk.monotone;
        const SlopeDiagnostic sd = slope_diagnostic(P, cfg.slope_d, cfg.grid_n, cfg.solver);
        out["slope_d_values"] = sd.d_values;
        out["slope_quotients"] = sd.quotients;
        out["slope_order"] = sd.order;
        out["slope_extrapolated"] = sd.extrapolated;
        out["slope_relative_error"] = sd.relative_error;
        say(ctx, "x_bar = " + io::format_double(P.x_to_original(sel.x_bar)));
    } else {
        out["distance"] = profile_distance(sol, P, inv, 0.0);
        out["d"] = d_min;
        say(ctx, "unique regime: the inviscid solution is unique, no selection needed");
    }
    write(ctx, "select.json", io::dump_json(out));
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, const CommandContext& ctx) {
    SuiteOptions opt;
    opt.discrete_cases = cfg.discrete_cases;
    opt.continuous_cases = cfg.continuous_cases;
    opt.seed = cfg.seed;
    const SuiteReport r = run_inequality_suite(opt);
    json out;
    out["command"] = "verify-inequalities";
    out["seed"] = cfg.seed;
    out["discrete_run"] = r.discrete_run;
    out["continuous_run"] = r.continuous_run;
    out["equality_cases"] = r.equality_cases;
    out["equality_detected"] = r.equality_detected;
    out["min_margin"] = r.min_margin;
    json fails = json::array();
    for (const SuiteFailure& f : r.failures)
        fails.push_back({{"kind", f.kind}, {"index", f.index}, {"case_seed", f.case_seed}, {"g", f.g_name},
                         {"gap", f.gap}, {"quadratic_term", f.quadratic_term}, {"slack", f.slack}});
    out["failures"] = fails;
    out["ok"] = r.ok();
    write(ctx, "inequalities.json", io::dump_json(out));
    say(ctx, std::to_string(r.discrete_run) + " discrete + " + std::to_string(r.continuous_run) +
                 " continuous cases, " + std::to_string(r.failures.size()) + " failures");
    return r.ok() ? kExitOk : kExitCounterexample;
}

int cmd_perturb(const RunConfig& cfg, const CommandContext& ctx) {
    const PerturbConfig& pc = cfg.perturb;
    const bool shear = !pc.field_file && !pc.random;
    VectorFieldFourier V;
    json out;
    out["command"] = "perturb";
    if (pc.field_file) {
        try {
            V = read_vector_field(*pc.field_file);
        } catch (const std::runtime_error& e) {
            throw ConfigError(e.what());
        }
        out["field"] = {{"file", *pc.field_file}};
    } else if (pc.random) {
        V = random_incompressible_field(pc.random->dim, pc.random->kmax, pc.random->decay, cfg.seed);
        out["field"] = {{"random", {{"dim", pc.random->dim}, {"kmax", pc.random->kmax}, {"decay", pc.random->decay}}},
                        {"seed", cfg.seed}};
    } else {
        V = shear_field(cfg.flow);
        out["field"] = {{"shear", flow_to_json(cfg.flow)}};
    }
    std::vector<double> p = pc.direction;
    if (p.empty()) {
        if (V.dim() != 2) throw UsageError("perturb.direction is required for fields of dimension != 2");
        p = {cfg.momentum.gamma, cfg.momentum.mu};
    }
    double norm = 0;
    for (double x : p) norm += x * x;
    if (std::abs(std::sqrt(norm) - 1) > 1e-12)
        throw UsageError("perturb: the direction must be a unit vector; divide it by its length " +
                         io::format_double(std::sqrt(norm)));
    if (int(p.size()) != V.dim()) throw UsageError("perturb: direction and field dimensions differ");
    if (!V.incompressible(1e-10)) throw UsageError("perturb: the field is not divergence free");
    if (!V.real_valued(1e-10)) throw UsageError("perturb: the field violates lambda_{-k} = conj(lambda_k)");

    const PerturbationResult r = effective_speed_expansion(V, p, pc.d, pc.delta);
    out["dimension"] = V.dim();
    out["modes"] = V.modes().size();
    out["direction"] = p;
    out["d"] = pc.d;
    out["delta"] = pc.delta;
    out["alpha1"] = r.alpha1;
    out["alpha2"] = r.alpha2;
    out["H_approx"] = r.H_approx;
    out["margin"] = r.diophantine_margin;
    out["truncation_K"] = r.truncation_K;

    if (!pc.d_grid.empty()) {
        std::vector<double> dg = pc.d_grid;
        std::sort(dg.begin(), dg.end());
        std::vector<double> a2;
        for (double d : dg) a2.push_back(effective_speed_expansion(V, p, d, pc.delta).alpha2);
        bool dec = true;
        for (std::size_t i = 1; i < a2.size(); ++i) dec = dec && a2[i] < a2[i - 1];
        out["d_grid"] = dg;
        out["alpha2_on_grid"] = a2;
        out["alpha2_strictly_decreasing"] = dec;
    }
    if (!pc.cross_check_deltas.empty()) {
        if (!shear) throw UsageError("perturb: the solver cross-check needs a shear flow (no field_file or random)");
        const Momentum m{p[0], p[1]};
        json rows = json::array();
        std::vector<double> deltas = pc.cross_check_deltas, errors;
        std::sort(deltas.begin(), deltas.end(), std::greater<>());
        for (double delta : deltas) {
            const ShearCrossCheck c = cross_check_shear(cfg.flow, m, pc.d, delta, cfg.grid_n, cfg.solver);
            rows.push_back({{"delta", delta}, {"H_solver", c.H_solver}, {"H_expansion", c.H_expansion},
                            {"error", c.error}});
            errors.push_back(c.error);
        }
        out["cross_check"] = rows;
        if (deltas.size() >= 2 && errors[errors.size() - 1] > 0 && errors[errors.size() - 2] > 0)
            out["cross_check_order"] = std::log(errors[errors.size() - 2] / errors.back()) /
                                       std::log(deltas[deltas.size() - 2] / deltas.back());
    }
    write(ctx, "perturb.json", io::dump_json(out));
    say(ctx, "alpha1 = " + io::format_double(r.alpha1) + ", alpha2 = " + io::format_double(r.alpha2));
    return kExitOk;
}

int cmd_hj(const RunConfig& cfg, const CommandContext& ctx) {
    const ScalarHamiltonian H = cfg.hj.hamiltonian == "quadratic" ? quadratic_hamiltonian() : nonconvex_hamiltonian();
    const int n = cfg.grid_n > 0 ? cfg.grid_n : 256;
    const HJSweep s = sweep_viscous_hj(build_flow(cfg.flow), H, cfg.hj.p, cfg.hj.d_values, n, cfg.solver);
    json out;
    out["command"] = "hj";
    out["hamiltonian"] = H.name;
    out["G"] = flow_to_json(cfg.flow);
    out["p"] = cfg.hj.p;
    out["grid_n"] = n;
    out["d"] = s.d_values;
    out["H_bar"] = s.H_bar;
    out["dH_dd_fd"] = s.dH_dd_fd;
    out["strictly_decreasing"] = s.strictly_decreasing;
    out["strictly_increasing"] = s.strictly_increasing;
    write(ctx, "hj.csv", io::csv({"d", "H_bar", "dH_dd_fd"}, {s.d_values, s.H_bar, s.dH_dd_fd}));
    write(ctx, "hj.json", io::dump_json(out));
    say(ctx, std::string("H_bar ") +
                 (s.strictly_decreasing ? "strictly decreasing"
                                        : s.strictly_increasing ? "strictly increasing" : "not monotone") +
                 " in d");
    return kExitOk;
}

int run_guarded(const std::function<int(const RunConfig&, const CommandContext&)>& cmd, const RunConfig& cfg,
                const CommandContext& ctx) {
    try {
        return cmd(cfg, ctx);
    } catch (const ConfigError& e) {
        say(ctx, std::string("config error: ") + e.what());
        return kExitConfig;
    } catch (const SelectionRefused& e) {
        say(ctx, std::string("selection refused: ") + e.what());
        return kExitSelectionRefused;
    } catch (const SolverError& e) {
        say(ctx, std::string("solver failure: ") + e.what());
        return kExitSolver;
    } catch (const std::invalid_argument& e) {
        say(ctx, std::string("invalid input: ") + e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        say(ctx, std::string("solver failure: ") + e.what());
        return kExitSolver;
    }
}

}  // namespace flamespeed
