/** \file    viscous_hj.hpp
    \brief   One-dimensional viscous Hamilton-Jacobi cell problem

        -d w'' + H(p + w') + G(x) = Hbar(p, d),   w 1-periodic, w(0) = 0.

    Same discretization and Newton machinery as the curvature cell problem.
*/
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flamespeed/cell_solver.hpp"
#include "flamespeed/flow_model.hpp"

namespace flamespeed {

struct ScalarHamiltonian {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

/// q^2 / 2
ScalarHamiltonian quadratic_hamiltonian();
/// q^2 / 2 - cos q  (not convex)
ScalarHamiltonian nonconvex_hamiltonian();

struct HJSolution {
    double d = 0;
    int grid_n = 0;
    double H_bar = 0;
    std::vector<double> w;      ///< w(0) = 0
    double residual = 0;
    int newton_iters = 0;
};

/** Newton solve at one d; starts from `guess` when given, else from w = 0,
    Hbar = H(p) + mean G.  Throws SolverError on failure. */
HJSolution solve_viscous_hj(const FlowProfile& G, const ScalarHamiltonian& H, double p, double d, int grid_n,
                            const SolverOptions& opt = {}, const HJSolution* guess = nullptr);

/// Continuation from max(d, 1) down to d, as for the curvature problem.
HJSolution solve_viscous_hj_continuation(const FlowProfile& G, const ScalarHamiltonian& H, double p, double d,
                                         int grid_n, const SolverOptions& opt = {});

struct HJSweep {
    std::vector<double> d_values;   ///< as given
    std::vector<double> H_bar;
    std::vector<double> dH_dd_fd;   ///< centered difference with step 1e-3 d
    bool strictly_decreasing = false;   ///< Hbar decreases as d increases and every derivative < 0
    bool strictly_increasing = false;
};

HJSweep sweep_viscous_hj(const FlowProfile& G, const ScalarHamiltonian& H, double p, std::vector<double> d_values,
                         int grid_n, const SolverOptions& opt = {});

}  // namespace flamespeed
