/** \file    cell_solver.hpp
    \brief   Viscous curvature cell problem for shear flows.

    In canonical form (gamma > 0, max v = 0) the corrector enters only through
    phi = (mu + w')/gamma, which is the periodic solution of

        -d phi' / (1 + phi^2) + sqrt(1 + phi^2) + v(y) = E,      mean(phi) = mu/gamma,

    and the effective Hamiltonian of the normalized problem is gamma * E.
    The equation is collocated on a uniform periodic grid (8th-order differences),
    the mean constraint closes the system for E, and Newton's method with a
    bordered sparse Jacobian solves it.  Small d is reached by geometric continuation.
*/
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "flamespeed/problem.hpp"

namespace flamespeed {

struct CellSolution {
    double d = 0;               ///< Markstein number
    int grid_n = 0;
    std::vector<double> phi;    ///< phi at y_j = j/N, normalized frame
    std::vector<double> w;      ///< corrector, w(0) = 0, normalized frame
    double E = 0;               ///< normalized eigenvalue
    double H = 0;               ///< effective Hamiltonian of the original problem
    double residual = 0;        ///< sup-norm of the collocation residual
    double residual_floor = 0;  ///< round-off level of the residual on this grid; convergence means residual <= max(tol, floor)
    int newton_iters = 0;
};

/// Newton failure; carries the last residual so the caller can refine the grid or the schedule.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double d, double residual)
        : std::runtime_error(what), d_(d), residual_(residual) {}
    double d() const { return d_; }
    double residual() const { return residual_; }

private:
    double d_, residual_;
};

struct SolverOptions {
    double tol = 1e-11;     ///< sup-norm of the residual, raised to the round-off floor on fine grids
    int max_iters = 50;     ///< Newton iterations per solve
};

/** Grid size that resolves the internal layers at Markstein number d
    (power of two, at least 256). */
int recommended_grid(double d);

/** One Newton solve at fixed d.  Starts from `guess` when given (it must live on the same grid),
    otherwise from phi = mu/gamma, E = sqrt(1 + (mu/gamma)^2) + mean v.
    Throws SolverError on non-convergence and std::invalid_argument for d <= 0 or a bad grid. */
CellSolution solve_cell(const NormalizedProblem& problem, double d, int grid_n,
                        const SolverOptions& opt = {}, const CellSolution* guess = nullptr);

/** Solve at d, reaching small d through the schedule d_k = d_start 2^-k with the
    step ratio relaxed on failure.  grid_n <= 0 selects recommended_grid(d). */
CellSolution solve_cell_continuation(const NormalizedProblem& problem, double d, int grid_n = 0,
                                     const SolverOptions& opt = {});

/// Closed-form result for gamma = 0: H = |mu|, w = 0.
CellSolution degenerate_direction_solution(const Momentum& p, double d, int grid_n);

/** Effective Hamiltonian H_d(p) for any p != 0, including the gamma = 0 direction. */
double effective_hamiltonian(const FlowProfile& flow, const Momentum& p, double d,
                             int grid_n = 0, const SolverOptions& opt = {});

/** |H - (integral of sqrt(gamma^2 + (mu + w')^2) + gamma * integral of v)|
    evaluated with the periodic trapezoid rule on the solution grid. */
double mean_identity_check(const CellSolution& sol, const NormalizedProblem& problem);

/** dE/dd from the closed-form quotient obtained by solving the linearized equation
        -d F' + b F = phi' + alpha (1 + phi^2),   b = 2 d phi phi'/(1 + phi^2) + phi sqrt(1 + phi^2),
    for a periodic, mean-zero F.  See docs/alpha_formula.md for the derivation at general d.
    Throws std::runtime_error if the denominator is not positive. */
double alpha_from_formula(const std::vector<double>& phi, double d);

/** The pieces of the quotient: alpha = -numerator / denominator, where both are stored
    divided by exp(log_scale) to stay finite.  numerator * exp(log_scale) equals the
    A + B - C gap of abc_functionals evaluated with the same d. */
struct AlphaQuotient {
    double alpha, numerator, denominator, log_scale;
};
AlphaQuotient alpha_quotient(const std::vector<double>& phi, double d);
inline double alpha_from_formula(const CellSolution& sol) { return alpha_from_formula(sol.phi, sol.d); }

struct SweepResult {
    std::vector<double> d_values;       ///< strictly increasing
    std::vector<double> H_values;
    std::vector<double> E_values;
    std::vector<double> dH_dd_fd;       ///< centered difference with step 1e-3 d
    std::vector<double> dE_dd_formula;  ///< alpha_from_formula
    std::vector<double> residuals;
    bool monotone_decreasing = false;   ///< H strictly decreasing and every FD derivative < 0
    int grid_n = 0;
};

/** Solves every d by continuation from the largest one downward.
    Throws SolverError naming the offending d. */
SweepResult sweep_markstein(const NormalizedProblem& problem, std::vector<double> d_values,
                            int grid_n = 0, const SolverOptions& opt = {});

}  // namespace flamespeed
