/** \file    inviscid.hpp
    \brief   The d = 0 cell problem  sqrt(gamma^2 + (mu + w0')^2) + gamma v = H0.

    Everything here works in the canonical frame of NormalizedProblem (gamma > 0,
    mu >= 0, max v = 0), where the equation reads sqrt(1 + (m + omega')^2) + v = H0_norm
    with m = mu/gamma and w0 = gamma * omega.  Writing u = m x + omega, the slope of u
    is +-S_H(y) with S_H = sqrt((H - v)^2 - 1).

    Two regimes:
      - m >= mu_star = int S_1:  H0_norm >= 1 is the root of F(H) = int S_H = m and the
        solution is unique up to a constant (u' = S_H > 0 everywhere).
      - m <  mu_star:            H0_norm = 1 and there is one solution per global maximum
        x_i of v, with u' = +S_1 on (x_i, x_mu) and u' = -S_1 on (x_mu, x_i + 1).
*/
#pragma once

#include <span>
#include <vector>

#include "flamespeed/problem.hpp"

namespace flamespeed {

enum class Regime { unique, trapped };

const char* to_string(Regime r);

struct InviscidTolerances {
    double quad_tol = 1e-13;        ///< relative tolerance of each Gauss-Kronrod panel (tighter only chases round-off)
    double root_tol = 1e-13;        ///< absolute tolerance on H0_norm and on turning points
    double newton_switch = 1e-3;    ///< pure bisection while H - 1 is below this
    int base_samples = 2048;        ///< branch samples per period
    int refine_factor = 8;          ///< extra density near kinks
    double refine_radius = 0.05;
};

/** One solution of the inviscid cell equation, sampled in the canonical frame.
    In the unique regime anchor = 0 and turning_point = 1 (u is increasing throughout). */
struct BranchSolution {
    double anchor = 0;          ///< global maximum x_i the branch emanates from
    double turning_point = 0;   ///< x_mu in (anchor, anchor + 1)
    std::vector<double> x;      ///< sample points in [0, 1), increasing
    std::vector<double> w;      ///< w(x) - w(0), gamma included
    std::vector<double> slope;  ///< u'(x) = m + omega'(x) on each sample (one-sided at kinks)
    double equation_residual = 0;   ///< max |sqrt(1 + u'^2) + v - H0_norm| off M0
    double periodicity_defect = 0;  ///< |omega(1) - omega(0)|
    std::vector<double> local_minima;   ///< local minima of u = m x + omega in [0, 1)
    bool kinks_ok = false;      ///< every local minimum of u lies on M0
};

struct InviscidResult {
    Regime regime = Regime::unique;
    double H0 = 0;          ///< effective Hamiltonian of the original problem
    double H0_norm = 0;     ///< canonical-frame value, >= 1
    double mu_star = 0;     ///< threshold on |mu| in original units (gamma * mu_star_norm)
    double mu_star_norm = 0;
    std::vector<BranchSolution> branches;
    double residual = 0;    ///< |F(H0_norm) - m| in the unique regime, 0 when trapped
};

/** S_H integrated over [a, b] (b - a <= 1 allowed to wrap), split at the maxima of v. */
class SlopeIntegral {
public:
    SlopeIntegral(const NormalizedProblem& problem, double H, const InviscidTolerances& tol = {});

    double H() const { return H_; }
    double integrand(double y) const;
    /// int_a^b S_H for a <= b (any real a, b)
    double operator()(double a, double b) const;
    /// int_0^1 S_H
    double period() const { return period_; }
    /// int_0^1 (H - v) / S_H, the derivative of period() in H; infinite at H = 1
    double period_derivative() const;

private:
    double panel(double a, double b) const;

    FlowProfile flow_;
    double H_;
    InviscidTolerances tol_;
    std::vector<double> breaks_;    ///< maxima of v in [0, 1)
    double period_ = 0;
};

/// mu_star_norm = int_0^1 sqrt((1 - v)^2 - 1) in the canonical frame; 0 for a constant flow.
double inviscid_threshold(const NormalizedProblem& problem, const InviscidTolerances& tol = {});

/** H0 with regime classification; branches are left empty (see enumerate_solutions).
    Equality m = mu_star is classified as unique. */
InviscidResult solve_inviscid_H(const NormalizedProblem& problem, const InviscidTolerances& tol = {});

/** The x_mu in (anchor, anchor + 1) with
        int_{anchor}^{x_mu} S_1 - int_{x_mu}^{anchor+1} S_1 = m.
    Throws std::invalid_argument in the unique regime. */
double turning_point(const NormalizedProblem& problem, double anchor, const InviscidTolerances& tol = {});

/** Samples the branch anchored at `anchor` (trapped) or the unique solution (anchor ignored)
    at the given points of [0, 1).  Returns w(x) - w(0) with w = gamma * omega. */
std::vector<double> branch_profile(const NormalizedProblem& problem, const InviscidResult& H0,
                                   double anchor, std::span<const double> xs,
                                   const InviscidTolerances& tol = {});

/** All solutions: one per global maximum in the trapped regime, a single one otherwise.
    Each branch is sampled on a refined grid and audited.
    Throws std::invalid_argument when the maximum set is not finite (constant flow, trapped). */
InviscidResult enumerate_solutions(const NormalizedProblem& problem, const InviscidTolerances& tol = {});

}  // namespace flamespeed
