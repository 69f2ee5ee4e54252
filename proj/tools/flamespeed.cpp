#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "flamespeed/commands.hpp"
#include "flamespeed/config.hpp"
#include "flamespeed/grid.hpp"
#include "flamespeed/io.hpp"

using namespace flamespeed;

int main(int argc, char** argv) {
    CLI::App app{"Turbulent flame speeds of the curvature G-equation in periodic shear flows"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid_n;
    std::optional<double> tol;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (default: config, then $FLAMESPEED_OUT, then ./flamespeed_out)");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--grid", grid_n, "grid points (power of two >= 64; 0 chooses per d)");
    app.add_option("--tol", tol, "Newton residual tolerance");

    struct Entry {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&, const CommandContext&);
    };
    const Entry entries[] = {
        {"solve", "solve the cell problem at one Markstein number", cmd_solve},
        {"sweep", "sweep the Markstein number and report monotonicity", cmd_sweep},
        {"inviscid", "inviscid effective Hamiltonian and all solution branches", cmd_inviscid},
        {"select", "physical fluctuation selected as d -> 0, with diagnostics", cmd_select},
        {"verify-inequalities", "randomized inequality suite", cmd_verify},
        {"perturb", "weak-flow expansion of the effective Hamiltonian", cmd_perturb},
        {"hj", "viscous Hamilton-Jacobi cell problem sweep in d", cmd_hj},
    };
    for (const Entry& e : entries) app.add_subcommand(e.name, e.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (grid_n) cfg.grid_n = *grid_n;
        if (tol) cfg.solver.tol = *tol;
        validate(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    CommandContext ctx{io::resolve_output_dir(out_dir, cfg.output_dir), &std::cerr};
    for (const Entry& e : entries)
        if (app.got_subcommand(e.name)) return run_guarded(e.fn, cfg, ctx);
    return kExitConfig;
}
