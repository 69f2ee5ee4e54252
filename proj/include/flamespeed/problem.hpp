/** \file    problem.hpp
    \brief   Momentum p = (gamma, mu) and reduction of a cell problem to canonical form.

    The shear cell problem has three exact symmetries:
      H_d((-gamma, mu); -v)      = H_d((gamma, mu); v)        (same corrector w)
      H_d((gamma, -mu); v(-.))   = H_d((gamma, mu); v)        (w reflected)
      H_d(p; v + c)              = H_d(p; v) + gamma c        (same corrector w)
    normalize() applies them so the solvers only see gamma > 0, mu >= 0 and a flow with max 0,
    and records what was done so results can be mapped back.
*/
#pragma once

#include <cmath>
#include <vector>

#include "flamespeed/flow_model.hpp"

namespace flamespeed {

struct Momentum {
    double gamma = 1.0;  ///< component along the shear direction
    double mu = 0.0;     ///< component across the shear

    double norm() const { return std::hypot(gamma, mu); }
};

class NormalizedProblem {
public:
    Momentum original;        ///< momentum as given
    FlowProfile original_flow;

    double gamma = 1.0;       ///< |gamma| > 0
    double mu = 0.0;          ///< |mu|
    FlowProfile flow;         ///< effective flow, max = 0

    bool gamma_flipped = false;  ///< v was replaced by -v
    bool reflected = false;      ///< y -> -y was applied
    double c_shift = 0.0;        ///< max of the (sign-adjusted) flow that was subtracted

    /// prescribed mean of phi = (mu + w')/gamma
    double phi_mean() const { return mu / gamma; }

    /// H of the original problem from the normalized eigenvalue E = H_norm / gamma
    double H_from_E(double E) const { return gamma * (E + c_shift); }
    double E_from_H(double H) const { return H / gamma - c_shift; }

    /// Maps grid samples y_j = j/N of the normalized frame back to the original frame.
    std::vector<double> to_original_frame(const std::vector<double>& samples) const;
    /// Maps a location of the normalized frame back to the original frame, in [0,1).
    double x_to_original(double x) const;
};

/** Canonical form of the cell problem for (flow, p).
    Throws std::invalid_argument when gamma = 0 (that direction is handled in closed form). */
NormalizedProblem normalize(const FlowProfile& flow, Momentum p);

}  // namespace flamespeed
