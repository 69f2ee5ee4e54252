#include "flamespeed/selection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace flamespeed {

SelectedMaximum select_xbar(const MaximaSet& maxima) {
    if (!maxima.is_finite || maxima.points.empty())
        throw SelectionRefused("selection ill-posed: the maximum set is not finite");
    if (!maxima.nondegenerate) throw SelectionRefused("selection ill-posed: degenerate maximum");
    if (!maxima.curvatures_distinct)
        throw SelectionRefused("selection ill-posed: maxima with equal curvature");
    const auto it = std::min_element(maxima.points.begin(), maxima.points.end(),
                                     [](const MaximumPoint& a, const MaximumPoint& b) {
                                         return a.neg_curvature < b.neg_curvature;
                                     });
    return {it->x, -std::sqrt(it->neg_curvature)};
}

SelectionResult physical_fluctuation(const NormalizedProblem& problem, const InviscidTolerances& tol) {
    SelectionResult out;
    InviscidResult inv = solve_inviscid_H(problem, tol);
    out.regime = inv.regime;
    out.trapped = inv.regime == Regime::trapped;
    out.H0_norm = inv.H0_norm;

    double anchor = 0.0;
    if (out.trapped) {
        const MaximaSet ms = locate_maxima(problem.flow);
        out.maxima_finite = ms.is_finite;
        out.curvatures_distinct = ms.curvatures_distinct;
        const SelectedMaximum sel = select_xbar(ms);
        out.x_bar = anchor = sel.x_bar;
        out.slope_target = sel.slope_target;
    }
    inv = enumerate_solutions(problem, tol);
    const auto& branches = inv.branches;
    const auto it = std::min_element(branches.begin(), branches.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.anchor - anchor) < std::abs(b.anchor - anchor);
    });
    out.x_mu = it->turning_point;
    out.x = it->x;
    out.w0 = it->w;
    out.local_minima = it->local_minima;
    return out;
}

double profile_distance(const CellSolution& sol, const NormalizedProblem& problem, const InviscidResult& inv,
                        double anchor) {
    const int n = sol.grid_n;
    std::vector<double> xs(n);
    for (int j = 0; j < n; ++j) xs[j] = double(j) / n;
    const std::vector<double> w0 = branch_profile(problem, inv, anchor, xs);
    double dist = 0;
    for (int j = 0; j < n; ++j) dist = std::max(dist, std::abs(sol.w[j] - w0[j]));
    return dist;
}

SelectionCheck verify_selection(const NormalizedProblem& problem, const std::vector<double>& d_values, int grid_n,
                                const SolverOptions& opt) {
    const InviscidResult inv = solve_inviscid_H(problem);
    if (inv.regime != Regime::trapped) throw SelectionRefused("selection check needs the trapped regime");
    const MaximaSet ms = locate_maxima(problem.flow);
    const SelectedMaximum sel = select_xbar(ms);

    SelectionCheck chk;
    chk.x_bar = sel.x_bar;
    chk.d_values = d_values;
    for (double d : d_values) {
        const CellSolution sol = solve_cell_continuation(problem, d, grid_n, opt);
        chk.grid_n.push_back(sol.grid_n);
        chk.distances.push_back(profile_distance(sol, problem, inv, sel.x_bar));
        double wrong = std::numeric_limits<double>::infinity();
        for (const auto& p : ms.points)
            if (p.x != sel.x_bar) wrong = std::min(wrong, profile_distance(sol, problem, inv, p.x));
        if (std::isfinite(wrong)) chk.wrong_distances.push_back(wrong);
    }
    // order the distances by decreasing d before judging monotonicity
    std::vector<std::size_t> idx(d_values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d_values[a] > d_values[b]; });
    chk.monotone = true;
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (!(chk.distances[idx[i]] < chk.distances[idx[i - 1]])) chk.monotone = false;
    return chk;
}

double verify_selection(const NormalizedProblem& problem, double d, int grid_n, const SolverOptions& opt) {
    return verify_selection(problem, std::vector<double>{d}, grid_n, opt).distances.front();
}

double richardson(double d1, double q1, double d2, double q2, double order) {
    const double a = std::pow(d1, order), b = std::pow(d2, order);
    return (q1 * b - q2 * a) / (b - a);
}

double observed_order(const std::array<double, 3>& d, const std::array<double, 3>& q) {
    const double r1 = d[1] / d[0], r2 = d[2] / d[1];
    const double dq1 = q[1] - q[0], dq2 = q[2] - q[1];
    if (std::abs(r1 - r2) > 1e-9 * r1 || dq1 == 0 || dq2 == 0 || (dq1 > 0) != (dq2 > 0)) return 1.0;
    return std::clamp(std::log(std::abs(dq2 / dq1)) / std::log(r1), 0.25, 4.0);
}

SlopeDiagnostic slope_diagnostic(const NormalizedProblem& problem, const std::vector<double>& d_values, int grid_n,
                                 const SolverOptions& opt) {
    if (d_values.size() < 2) throw std::invalid_argument("slope_diagnostic: need at least two d values");
    const InviscidResult inv = solve_inviscid_H(problem);
    if (inv.regime != Regime::trapped) throw SelectionRefused("slope diagnostic needs the trapped regime");

    SlopeDiagnostic out;
    out.d_values = d_values;
    out.slope_target = select_xbar(locate_maxima(problem.flow)).slope_target;
    for (double d : d_values) {
        const CellSolution sol = solve_cell_continuation(problem, d, grid_n, opt);
        out.quotients.push_back((sol.E - 1.0) / d);
    }
    std::vector<std::size_t> idx(d_values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d_values[a] < d_values[b]; });
    const std::size_t a = idx[0], b = idx[1];
    if (idx.size() >= 3) {
        const std::size_t c = idx[2];
        out.order = observed_order({d_values[a], d_values[b], d_values[c]},
                                   {out.quotients[a], out.quotients[b], out.quotients[c]});
    }
    out.extrapolated = richardson(d_values[a], out.quotients[a], d_values[b], out.quotients[b], out.order);
    out.relative_error = std::abs(out.extrapolated - out.slope_target) / std::abs(out.slope_target);
    return out;
}

}  // namespace flamespeed
