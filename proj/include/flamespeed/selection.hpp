/** \file    selection.hpp
    \brief   The inviscid solution singled out by the limit d -> 0 and checks against the viscous solver.

    In the trapped regime the limit of the viscous correctors is the inviscid branch
    anchored at the flattest global maximum x_bar of v (smallest -v''), and
    (H_norm(d) - 1)/d tends to -sqrt(-v''(x_bar)).
*/
#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "flamespeed/cell_solver.hpp"
#include "flamespeed/inviscid.hpp"

namespace flamespeed {

/// Selection is not well posed for this flow (tie in curvature, degenerate or infinite maximum set).
class SelectionRefused : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SelectedMaximum {
    double x_bar = 0;
    double slope_target = 0;    ///< -sqrt(-v''(x_bar))
};

/** Picks the global maximum with the smallest -v''.
    Throws SelectionRefused when the set is not finite, has a degenerate point or has tied curvatures. */
SelectedMaximum select_xbar(const MaximaSet& maxima);

struct SelectionResult {
    Regime regime = Regime::trapped;
    double x_bar = 0;           ///< canonical frame
    double slope_target = 0;
    double x_mu = 0;            ///< turning point of the selected branch (1 in the unique regime)
    double H0_norm = 1;
    std::vector<double> x;      ///< canonical-frame sample points
    std::vector<double> w0;     ///< w0(x) - w0(0)
    bool maxima_finite = true;
    bool curvatures_distinct = true;
    bool trapped = true;
    std::vector<double> local_minima;   ///< of u = m x + w0/gamma, must be {x_bar} when trapped
};

/** Builds the selected profile.  In the unique regime the unique solution is returned with
    regime = unique and x_bar = x_mu = 0 / 1.  Throws SelectionRefused when the trapped regime
    meets an ill-posed maximum set. */
SelectionResult physical_fluctuation(const NormalizedProblem& problem, const InviscidTolerances& tol = {});

/// sup_j |w_d(x_j) - (w0(x_j) - w0(0))| on the solution grid, both in the canonical frame.
double profile_distance(const CellSolution& sol, const NormalizedProblem& problem, const InviscidResult& inv,
                        double anchor);

struct SelectionCheck {
    std::vector<double> d_values;           ///< as given (typically decreasing)
    std::vector<double> distances;          ///< to the selected branch
    std::vector<double> wrong_distances;    ///< to the nearest branch anchored elsewhere (empty if none)
    std::vector<int> grid_n;
    bool monotone = false;                  ///< distance decreases as d decreases
    double x_bar = 0;
};

/** Distance of viscous solutions to the selected branch over a list of d values.
    Requires the trapped regime with a well-posed maximum set (SelectionRefused otherwise). */
SelectionCheck verify_selection(const NormalizedProblem& problem, const std::vector<double>& d_values,
                                int grid_n = 0, const SolverOptions& opt = {});

/// Distance at a single d.
double verify_selection(const NormalizedProblem& problem, double d, int grid_n = 0, const SolverOptions& opt = {});

struct SlopeDiagnostic {
    std::vector<double> d_values;
    std::vector<double> quotients;      ///< (H_norm(d) - 1)/d
    double order = 1;                   ///< exponent of the leading correction, observed from the three smallest d
    double extrapolated = 0;            ///< Richardson limit from the two smallest d
    double slope_target = 0;
    double relative_error = 0;          ///< |extrapolated - target| / |target|
};

/// Two-point extrapolation of s under q(d) = s + c d^order.
double richardson(double d1, double q1, double d2, double q2, double order = 1.0);

/** Exponent of the leading correction from three geometrically spaced d (sorted increasing).
    Returns 1 when the spacing is not geometric or the differences change sign; clamped to [0.25, 4]. */
double observed_order(const std::array<double, 3>& d, const std::array<double, 3>& q);

/** Quotients (H_norm - 1)/d and their extrapolated limit.  With three or more d values the
    correction exponent is observed, otherwise it is taken as 1.  Requires the trapped regime. */
SlopeDiagnostic slope_diagnostic(const NormalizedProblem& problem, const std::vector<double>& d_values,
                                 int grid_n = 0, const SolverOptions& opt = {});

}  // namespace flamespeed
