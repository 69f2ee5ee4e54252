#include "flamespeed/viscous_hj.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "flamespeed/grid.hpp"

namespace flamespeed {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// unknowns z = (w_1..w_{n-1}, Hbar); w_0 = 0
void hj_residual(const Eigen::VectorXd& z, const std::vector<double>& G, const ScalarHamiltonian& H, double p,
                 double d, Eigen::VectorXd& r, std::vector<double>& w, std::vector<double>& dw) {
    const int n = int(G.size());
    w.assign(n, 0.0);
    for (int j = 1; j < n; ++j) w[j] = z[j - 1];
    dw = grid::periodic_derivative(w);
    const std::vector<double> d2w = grid::periodic_second_derivative(w);
    const double Hbar = z[n - 1];
    for (int j = 0; j < n; ++j) r[j] = -d * d2w[j] + H.value(p + dw[j]) + G[j] - Hbar;
}

void hj_jacobian(const std::vector<double>& dw, const ScalarHamiltonian& H, double p, double d, SpMat& J) {
    const int n = int(dw.size());
    const double inv_h = n, inv_h2 = double(n) * n;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(n) * 10);
    auto add = [&](int row, int col, double v) {
        if (col != 0) trip.emplace_back(row, col - 1, v);
    };
    for (int j = 0; j < n; ++j) {
        const double c2 = -d * inv_h2;
        const double c1 = H.derivative(p + dw[j]) * inv_h;
        add(j, j, c2 * grid::kD2[0]);
        for (int k = 1; k <= grid::kStencilHalfWidth; ++k) {
            add(j, (j + k) % n, c2 * grid::kD2[k] + c1 * grid::kD1[k - 1]);
            add(j, (j - k + n) % n, c2 * grid::kD2[k] - c1 * grid::kD1[k - 1]);
        }
        trip.emplace_back(j, n - 1, -1.0);
    }
    J.setFromTriplets(trip.begin(), trip.end());
}

double round_off_floor(const std::vector<double>& w, double d, double Hbar) {
    const double n = double(w.size());
    double wmax = 0;
    for (double x : w) wmax = std::max(wmax, std::abs(x));
    return 16 * std::numeric_limits<double>::epsilon() * (d * n * n * 6.5 * wmax + 2 + std::abs(Hbar));
}

}  // namespace

ScalarHamiltonian quadratic_hamiltonian() {
    return {"q^2/2", [](double q) { return 0.5 * q * q; }, [](double q) { return q; }};
}

ScalarHamiltonian nonconvex_hamiltonian() {
    return {"q^2/2 - cos q", [](double q) { return 0.5 * q * q - std::cos(q); },
            [](double q) { return q + std::sin(q); }};
}

HJSolution solve_viscous_hj(const FlowProfile& G, const ScalarHamiltonian& H, double p, double d, int n,
                            const SolverOptions& opt, const HJSolution* guess) {
    if (!(d > 0)) throw std::invalid_argument("solve_viscous_hj: d must be positive");
    if (n < 64 || !grid::is_pow2(n)) throw std::invalid_argument("grid_n must be a power of two >= 64");
    const std::vector<double> g = G.sample(n);

    Eigen::VectorXd z(n), r(n), r_try(n), z_try(n), dz(n);
    if (guess) {
        if (guess->grid_n != n) throw std::invalid_argument("solve_viscous_hj: guess on another grid");
        for (int j = 1; j < n; ++j) z[j - 1] = guess->w[j];
        z[n - 1] = guess->H_bar;
    } else {
        z.setZero();
        z[n - 1] = H.value(p) + G.mean();
    }
    std::vector<double> w, dw, w_try, dw_try;
    hj_residual(z, g, H, p, d, r, w, dw);
    double res = r.lpNorm<Eigen::Infinity>();
    auto target = [&] { return std::max(opt.tol, round_off_floor(w, d, z[n - 1])); };

    SpMat J(n, n);
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    int it = 0;
    for (; it < opt.max_iters && !(res <= target()); ++it) {
        hj_jacobian(dw, H, p, d, J);
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success) throw SolverError("singular Newton matrix", d, res);
        dz = lu.solve(-r);
        const double merit = r.norm();
        double lambda = 1;
        bool ok = false;
        for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
            z_try = z + lambda * dz;
            hj_residual(z_try, g, H, p, d, r_try, w_try, dw_try);
            if (std::isfinite(r_try.norm()) && r_try.norm() < (1 - 1e-4 * lambda) * merit) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            if (res <= 100 * target()) break;
            std::ostringstream os;
            os << "viscous HJ Newton stalled at d = " << d << " (residual " << res << ")";
            throw SolverError(os.str(), d, res);
        }
        z.swap(z_try);
        r.swap(r_try);
        w.swap(w_try);
        dw.swap(dw_try);
        res = r.lpNorm<Eigen::Infinity>();
    }
    if (!(res <= 100 * target())) {
        std::ostringstream os;
        os << "viscous HJ Newton did not converge at d = " << d << " (residual " << res << ")";
        throw SolverError(os.str(), d, res);
    }
    HJSolution sol;
    sol.d = d;
    sol.grid_n = n;
    sol.H_bar = z[n - 1];
    sol.w = w;
    sol.residual = res;
    sol.newton_iters = it;
    return sol;
}

HJSolution solve_viscous_hj_continuation(const FlowProfile& G, const ScalarHamiltonian& H, double p, double d,
                                         int n, const SolverOptions& opt) {
    double d_start = std::max(d, 1.0);
    HJSolution cur;
    for (;;) {
        try {
            cur = solve_viscous_hj(G, H, p, d_start, n, opt);
            break;
        } catch (const SolverError&) {
            d_start *= 4;
            if (d_start > 1e6) throw;
        }
    }
    double ratio = 0.5;
    while (cur.d > d) {
        const double next = std::max(d, cur.d * ratio);
        try {
            cur = solve_viscous_hj(G, H, p, next, n, opt, &cur);
            ratio = std::max(0.5, ratio * ratio);
        } catch (const SolverError& e) {
            ratio = std::sqrt(ratio);
            if (ratio > 0.99) throw SolverError("viscous HJ continuation stalled", next, e.residual());
        }
    }
    return cur;
}

HJSweep sweep_viscous_hj(const FlowProfile& G, const ScalarHamiltonian& H, double p, std::vector<double> d_values,
                         int n, const SolverOptions& opt) {
    HJSweep out;
    out.d_values = d_values;
    for (double d : d_values) {
        const HJSolution s = solve_viscous_hj_continuation(G, H, p, d, n, opt);
        const double h = 1e-3 * d;
        const HJSolution sp = solve_viscous_hj(G, H, p, d + h, n, opt, &s);
        const HJSolution sm = solve_viscous_hj(G, H, p, d - h, n, opt, &s);
        out.H_bar.push_back(s.H_bar);
        out.dH_dd_fd.push_back((sp.H_bar - sm.H_bar) / (2 * h));
    }
    std::vector<std::size_t> idx(d_values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d_values[a] < d_values[b]; });
    bool dec = true, inc = true;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        dec = dec && out.H_bar[idx[i]] < out.H_bar[idx[i - 1]];
        inc = inc && out.H_bar[idx[i]] > out.H_bar[idx[i - 1]];
    }
    for (double g : out.dH_dd_fd) {
        dec = dec && g < 0;
        inc = inc && g > 0;
    }
    out.strictly_decreasing = dec;
    out.strictly_increasing = inc;
    return out;
}

}  // namespace flamespeed
