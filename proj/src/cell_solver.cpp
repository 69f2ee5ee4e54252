#include "flamespeed/cell_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "flamespeed/grid.hpp"

namespace flamespeed {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

void check_grid(int n) {
    if (n < 64 || !grid::is_pow2(n))
        throw std::invalid_argument("grid_n must be a power of two >= 64");
}

double sup_norm(const Eigen::VectorXd& r) { return r.lpNorm<Eigen::Infinity>(); }

/** Discrete state for the corrector omega = w/gamma with omega_0 = 0 pinned:
    phi = m + D omega, phi' ~ D2 omega.  Unknowns z = (omega_1..omega_{n-1}, E).
    Collocating on omega rather than phi keeps the sawtooth mode out of the null space of D. */
struct CellState {
    std::vector<double> omega, phi, d2;
};

void cell_residual(const Eigen::VectorXd& z, std::span<const double> v, double d, double m,
                   Eigen::VectorXd& r, CellState& st) {
    const int n = int(v.size());
    st.omega.assign(n, 0.0);
    for (int j = 1; j < n; ++j) st.omega[j] = z[j - 1];
    st.phi = grid::periodic_derivative(st.omega);
    for (double& p : st.phi) p += m;
    st.d2 = grid::periodic_second_derivative(st.omega);
    const double E = z[n - 1];
    for (int j = 0; j < n; ++j) {
        const double q = 1 + st.phi[j] * st.phi[j];
        r[j] = -d * st.d2[j] / q + std::sqrt(q) + v[j] - E;
    }
}

void cell_jacobian(const CellState& st, double d, SpMat& J) {
    const int n = int(st.phi.size());
    const double inv_h = n, inv_h2 = double(n) * n;
    std::vector<Triplet> trip;
    trip.reserve(std::size_t(n) * (2 * grid::kStencilHalfWidth + 2));
    auto add = [&](int row, int col, double val) {
        if (col != 0) trip.emplace_back(row, col - 1, val);  // omega_0 is pinned
    };
    for (int j = 0; j < n; ++j) {
        const double phi = st.phi[j];
        const double q = 1 + phi * phi;
        const double c2 = -d / q * inv_h2;
        const double c1 = (2 * d * st.d2[j] * phi / (q * q) + phi / std::sqrt(q)) * inv_h;
        add(j, j, c2 * grid::kD2[0]);
        for (int k = 1; k <= grid::kStencilHalfWidth; ++k) {
            const int jp = (j + k) % n, jm = (j - k + n) % n;
            add(j, jp, c2 * grid::kD2[k] + c1 * grid::kD1[k - 1]);
            add(j, jm, c2 * grid::kD2[k] - c1 * grid::kD1[k - 1]);
        }
        trip.emplace_back(j, n - 1, -1.0);
    }
    J.setFromTriplets(trip.begin(), trip.end());
}

/** Rounding floor of the collocation residual.  The second difference amplifies the
    round-off in omega by n^2, so at fine grids 1e-11 is not attainable in double precision. */
double rounding_floor(const CellState& st, double d, double E) {
    const double n = double(st.omega.size());
    double wmax = 0, pmax = 0;
    for (double x : st.omega) wmax = std::max(wmax, std::abs(x));
    for (double x : st.phi) pmax = std::max(pmax, std::abs(x));
    double s2 = std::abs(grid::kD2[0]);
    for (int k = 1; k <= grid::kStencilHalfWidth; ++k) s2 += 2 * std::abs(grid::kD2[k]);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    return 16 * eps * (d * n * n * s2 * wmax + 2 + pmax + std::abs(E));
}

std::string describe_failure(double d, int iters, double res) {
    std::ostringstream os;
    os << "Newton did not converge at d = " << d << " after " << iters << " iterations (residual " << res << ")";
    return os.str();
}

}  // namespace

int recommended_grid(double d) {
    if (!(d > 0)) throw std::invalid_argument("recommended_grid: d must be positive");
    const double want = std::ceil(8.0 / d);
    if (want >= double(1 << 20)) return 1 << 20;
    return std::max(256, grid::next_pow2(int(want)));
}

CellSolution solve_cell(const NormalizedProblem& problem, double d, int n, const SolverOptions& opt,
                        const CellSolution* guess) {
    if (!(d > 0) || !std::isfinite(d)) throw std::invalid_argument("solve_cell: d must be positive");
    check_grid(n);
    if (guess && guess->grid_n != n) throw std::invalid_argument("solve_cell: initial guess lives on another grid");

    const double m = problem.phi_mean();
    const std::vector<double> v = problem.flow.sample(n);

    Eigen::VectorXd z(n);
    if (guess) {
        for (int j = 1; j < n; ++j) z[j - 1] = guess->w[j] / problem.gamma;
        z[n - 1] = guess->E;
    } else {
        z.setZero();
        z[n - 1] = std::sqrt(1 + m * m) + problem.flow.mean();
    }

    Eigen::VectorXd r(n), r_try(n), dz(n), z_try(n);
    CellState st, st_try;
    SpMat J(n, n);
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;

    cell_residual(z, v, d, m, r, st);
    double res = sup_norm(r);
    auto target = [&] { return std::max(opt.tol, rounding_floor(st, d, z[n - 1])); };
    int it = 0;
    for (; it < opt.max_iters && !(res <= target()); ++it) {
        cell_jacobian(st, d, J);
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success) throw SolverError("singular Newton matrix", d, res);
        dz = lu.solve(-r);

        // backtracking on the residual 2-norm
        const double merit = r.norm();
        double lambda = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
            z_try = z + lambda * dz;
            cell_residual(z_try, v, d, m, r_try, st_try);
            const double mt = r_try.norm();
            if (std::isfinite(mt) && mt < (1 - 1e-4 * lambda) * merit) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // residual at its rounding floor: accept if close to tolerance
            if (res <= 100 * target()) break;
            throw SolverError(describe_failure(d, it, res), d, res);
        }
        z.swap(z_try);
        r.swap(r_try);
        std::swap(st, st_try);
        res = sup_norm(r);
    }
    if (!(res <= target()) && !(res <= 100 * target() && it < opt.max_iters))
        throw SolverError(describe_failure(d, it, res), d, res);

    CellSolution sol;
    sol.d = d;
    sol.grid_n = n;
    sol.phi = st.phi;
    sol.E = z[n - 1];
    sol.H = problem.H_from_E(sol.E);
    sol.residual = res;
    sol.residual_floor = rounding_floor(st, d, sol.E);
    sol.newton_iters = it;
    sol.w = st.omega;
    for (double& x : sol.w) x *= problem.gamma;
    return sol;
}

CellSolution solve_cell_continuation(const NormalizedProblem& problem, double d, int n, const SolverOptions& opt) {
    if (!(d > 0) || !std::isfinite(d)) throw std::invalid_argument("solve_cell_continuation: d must be positive");
    if (n <= 0) n = recommended_grid(d);
    check_grid(n);

    // cold start where it is reliable: the solution is close to constant for large d
    double d_start = std::max(d, 1.0);
    CellSolution current;
    for (;;) {
        try {
            current = solve_cell(problem, d_start, n, opt);
            break;
        } catch (const SolverError&) {
            d_start *= 4;
            if (d_start > 1e6) throw;
        }
    }
    // walk down to d; the step ratio shrinks toward 1 on failure and recovers on success
    double ratio = 0.5;
    double last_res = current.residual;
    while (current.d > d) {
        const double next = std::max(d, current.d * ratio);
        try {
            current = solve_cell(problem, next, n, opt, &current);
            last_res = current.residual;
            ratio = std::max(0.5, ratio * ratio);
        } catch (const SolverError& e) {
            ratio = std::sqrt(ratio);
            last_res = e.residual();
            if (ratio > 0.99)
                throw SolverError("continuation stalled before reaching d = " + std::to_string(d), d, last_res);
        }
    }
    return current;
}

CellSolution degenerate_direction_solution(const Momentum& p, double d, int n) {
    CellSolution sol;
    sol.d = d;
    sol.grid_n = n;
    sol.phi.assign(n, 0.0);
    sol.w.assign(n, 0.0);
    sol.E = std::abs(p.mu);
    sol.H = std::abs(p.mu);
    return sol;
}

double effective_hamiltonian(const FlowProfile& flow, const Momentum& p, double d, int n, const SolverOptions& opt) {
    if (!std::isfinite(p.gamma) || !std::isfinite(p.mu)) throw std::invalid_argument("momentum is not finite");
    if (p.gamma == 0.0 && p.mu == 0.0) throw std::invalid_argument("momentum must be nonzero");
    if (!(d > 0)) throw std::invalid_argument("d must be positive");
    if (p.gamma == 0.0) return std::abs(p.mu);
    return solve_cell_continuation(normalize(flow, p), d, n, opt).H;
}

double mean_identity_check(const CellSolution& sol, const NormalizedProblem& problem) {
    double s = 0;
    for (double phi : sol.phi) s += std::sqrt(1 + phi * phi);
    s /= double(sol.phi.size());
    const double rhs = problem.gamma * (s + problem.flow.mean() + problem.c_shift);
    return std::abs(sol.H - rhs);
}

AlphaQuotient alpha_quotient(const std::vector<double>& phi, double d) {
    if (!(d > 0)) throw std::invalid_argument("alpha_from_formula: d must be positive");
    const int n = int(phi.size());
    const double h = 1.0 / n;
    const std::vector<double> dphi = grid::periodic_derivative(phi);

    // g(x) = log(1 + phi^2) - log(1 + phi(0)^2) + (1/d) int_0^x phi sqrt(1 + phi^2)
    std::vector<double> flux(n);
    for (int j = 0; j < n; ++j) flux[j] = phi[j] * std::sqrt(1 + phi[j] * phi[j]);
    const std::vector<double> hint = grid::cumulative_periodic(flux);
    std::vector<double> g(n + 1), q(n + 1), dp(n + 1);
    const double log0 = std::log1p(phi[0] * phi[0]);
    for (int j = 0; j <= n; ++j) {
        const double p = phi[j % n];
        q[j] = 1 + p * p;
        dp[j] = dphi[j % n];
        g[j] = std::log(q[j]) - log0 + hint[j] / d;
    }
    const double g1 = g[n];
    const auto [gmin_it, gmax_it] = std::minmax_element(g.begin(), g.end());
    const double gmin = *gmin_it, gmax = *gmax_it;

    // e^{g} and e^{-g} are shifted separately so both stay <= 1; every double-integral term then
    // carries the common factor e^{gmin - gmax}, which goes into log_scale
    std::vector<double> eg(n + 1), a(n + 1), b(n + 1);
    for (int j = 0; j <= n; ++j) {
        eg[j] = std::exp(g[j] - gmax);
        const double emg = std::exp(gmin - g[j]);
        a[j] = dp[j] * emg;
        b[j] = q[j] * emg;
    }
    // inner integrals from the left (A, B) and from the right (their complements up to 1)
    const std::vector<double> cumA = grid::cumulative(a, h), cumB = grid::cumulative(b, h);
    std::vector<double> ra(a.rbegin(), a.rend()), rb(b.rbegin(), b.rend());
    const std::vector<double> tailA = grid::cumulative(ra, h), tailB = grid::cumulative(rb, h);
    std::vector<double> la(n + 1), lb(n + 1), ua(n + 1), ub(n + 1);
    for (int j = 0; j <= n; ++j) {
        la[j] = eg[j] * cumA[j];
        lb[j] = eg[j] * cumB[j];
        ua[j] = eg[j] * tailA[n - j];
        ub[j] = eg[j] * tailB[n - j];
    }
    const double P2 = grid::integrate(la, h), R2 = grid::integrate(lb, h);
    const double U2 = grid::integrate(ua, h), T2 = grid::integrate(ub, h);

    // alpha = -(P2 + e^{g1} U2) / (R2 + e^{g1} T2); both denominator terms are positive,
    // which avoids the cancellation in the equivalent form e^{g1} R1 I1 - (e^{g1} - 1) R2
    double num, den, log_scale = gmax - gmin;
    if (g1 > 0) {
        log_scale += g1;
        const double e = std::exp(-g1);
        num = e * P2 + U2;
        den = e * R2 + T2;
    } else {
        const double e = std::exp(g1);
        num = P2 + e * U2;
        den = R2 + e * T2;
    }
    if (!(den > 0)) throw std::runtime_error("alpha_from_formula: non-positive denominator (quadrature failure)");
    return {-num / den, num, den, log_scale};
}

double alpha_from_formula(const std::vector<double>& phi, double d) { return alpha_quotient(phi, d).alpha; }

SweepResult sweep_markstein(const NormalizedProblem& problem, std::vector<double> d_values, int n,
                            const SolverOptions& opt) {
    if (d_values.empty()) throw std::invalid_argument("sweep_markstein: empty d schedule");
    for (double d : d_values)
        if (!(d > 0) || !std::isfinite(d)) throw std::invalid_argument("sweep_markstein: d values must be positive");
    std::sort(d_values.begin(), d_values.end());
    if (std::adjacent_find(d_values.begin(), d_values.end()) != d_values.end())
        throw std::invalid_argument("sweep_markstein: d values must be distinct");
    if (n <= 0) n = recommended_grid(d_values.front());

    const std::size_t k = d_values.size();
    SweepResult out;
    out.grid_n = n;
    out.d_values = d_values;
    out.H_values.resize(k);
    out.E_values.resize(k);
    out.dH_dd_fd.resize(k);
    out.dE_dd_formula.resize(k);
    out.residuals.resize(k);

    constexpr double rel_step = 1e-3;
    CellSolution prev;
    bool have_prev = false;
    for (std::size_t i = k; i-- > 0;) {
        const double d = d_values[i];
        CellSolution sol;
        try {
            if (have_prev) {
                // descend from the previous d through intermediate halvings if needed
                CellSolution cur = prev;
                while (cur.d > d) {
                    const double next = std::max(d, cur.d * 0.5);
                    cur = solve_cell(problem, next, n, opt, &cur);
                }
                sol = cur;
            } else {
                sol = solve_cell_continuation(problem, d, n, opt);
            }
            const double hstep = rel_step * d;
            const CellSolution up = solve_cell(problem, d + hstep, n, opt, &sol);
            const CellSolution dn = solve_cell(problem, d - hstep, n, opt, &sol);
            out.dH_dd_fd[i] = (up.H - dn.H) / (2 * hstep);
        } catch (const SolverError& e) {
            std::ostringstream os;
            os << "sweep failed at d = " << d << ": " << e.what();
            throw SolverError(os.str(), d, e.residual());
        }
        out.H_values[i] = sol.H;
        out.E_values[i] = sol.E;
        out.residuals[i] = sol.residual;
        out.dE_dd_formula[i] = alpha_from_formula(sol);
        prev = std::move(sol);
        have_prev = true;
    }

    bool mono = true;
    for (std::size_t i = 0; i + 1 < k; ++i)
        if (!(out.H_values[i + 1] < out.H_values[i])) mono = false;
    for (double x : out.dH_dd_fd)
        if (!(x < 0)) mono = false;
    out.monotone_decreasing = mono;
    return out;
}

}  // namespace flamespeed
