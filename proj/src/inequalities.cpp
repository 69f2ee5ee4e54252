#include "flamespeed/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "flamespeed/grid.hpp"

namespace flamespeed {

namespace {

double slack_for(double lhs, double rhs) { return 1e-9 * std::max({std::abs(lhs), std::abs(rhs), 1.0}); }

InequalityReport finish(double lhs, double rhs, double quad, bool increasing) {
    InequalityReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.gap = increasing ? rhs - lhs : lhs - rhs;
    r.quadratic_term = quad;
    r.slack = slack_for(lhs, rhs);
    r.pass = r.gap >= quad - r.slack;
    r.equality = std::abs(r.gap) <= r.slack;
    return r;
}

double h_total(const std::vector<double>& phi, double d) {
    double s = 0;
    for (double p : phi) s += p * std::sqrt(1 + p * p);
    return s / double(phi.size()) / d;
}

}  // namespace

AbcValues abc_functionals(const std::vector<double>& phi, double d) {
    if (!(d > 0)) throw std::invalid_argument("abc_functionals: d must be positive");
    const int n = int(phi.size());
    const double h = 1.0 / n;
    std::vector<double> flux(n);
    for (int j = 0; j < n; ++j) flux[j] = phi[j] * std::sqrt(1 + phi[j] * phi[j]) / d;
    const std::vector<double> H = grid::cumulative_periodic(flux);

    AbcValues out;
    out.h1 = H[n];
    const auto [lo, hi] = std::minmax_element(H.begin(), H.end());
    const double shift = 0.5 * (*lo + *hi);

    std::vector<double> qE(n + 1), lamq(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double p = phi[j % n];
        qE[j] = (1 + p * p) * std::exp(H[j] - shift);
        lamq[j] = std::atan(p) * (1 + p * p);
    }
    const std::vector<double> K = grid::cumulative(qE, h);
    const double Ktot = K[n];
    std::vector<double> ia(n + 1), ib(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double p = phi[j % n];
        const double weight = std::atan(p) * std::exp(shift - H[j]) * flux[j % n];
        ia[j] = weight * K[j];
        ib[j] = weight * (Ktot - K[j]);
    }
    out.A = std::exp(out.h1) * grid::integrate(ia, h);
    out.B = grid::integrate(ib, h);
    out.C = std::expm1(out.h1) * grid::integrate(lamq, h);
    out.gap = out.A + out.B - out.C;
    return out;
}

std::vector<double> reflect_profile(const std::vector<double>& phi) {
    const std::size_t n = phi.size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = -phi[(n - j) % n];
    return out;
}

SplitReport split_inequality_check(const std::vector<double>& phi, double d) {
    SplitReport s;
    std::vector<double> p = phi;
    if (h_total(p, d) < 0) {
        p = reflect_profile(p);
        s.reflected = true;
    }
    std::vector<double> plus(p.size()), minus(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        plus[j] = std::max(p[j], 0.0);
        minus[j] = std::min(p[j], 0.0);
    }
    s.nonnegative = std::all_of(p.begin(), p.end(), [](double x) { return x >= 0; });
    s.h_minus_1 = h_total(minus, d);
    const double lhs = abc_functionals(p, d).gap;
    const double rhs = std::exp(s.h_minus_1) * abc_functionals(plus, d).gap;
    s.report = finish(lhs, rhs, 0.0, false);
    return s;
}

GFunction inverse_sine_g(double L) {
    if (!(L > 0 && L < std::numbers::pi / 2)) throw std::invalid_argument("inverse_sine_g: need 0 < L < pi/2");
    const double s = std::sin(L);
    return {"1/sin", [](double y) { return 1.0 / std::sin(y); }, std::cos(L) / (s * s), L, false};
}

GFunction inverse_sine_g_canonical(double M) {
    if (!(M > 0)) throw std::invalid_argument("inverse_sine_g_canonical: need M > 0");
    return {"1/sin (canonical theta)", [](double y) { return 1.0 / std::sin(y); }, 1.0 / std::sqrt(1 + M * M),
            std::atan(M), false};
}

GFunction exponential_g(double k, double L) {
    return {"exp(-k y)", [k](double y) { return std::exp(-k * y); }, k * std::exp(-k * L), L, false};
}

GFunction linear_g(double A, double theta, double L) {
    return {"A - theta y", [A, theta](double y) { return A - theta * y; }, theta, L, false};
}

GFunction cubic_g(double L) { return {"1 - y^3", [](double y) { return 1 - y * y * y; }, 0.0, L, false}; }

GFunction increasing_linear_g(double theta, double L) {
    return {"theta y", [theta](double y) { return theta * y; }, theta, L, true};
}

InequalityReport continuous_inequality(const std::vector<double>& f, double T, const GFunction& g) {
    const int N = int(f.size()) - 1;
    if (N < 5) throw std::invalid_argument("continuous_inequality: need at least 6 samples");
    if (!(T > 0)) throw std::invalid_argument("continuous_inequality: T must be positive");
    for (double x : f)
        if (!(x > 0) || x > g.L * (1 + 1e-12))
            throw std::invalid_argument("continuous_inequality: f must lie in (0, L]");
    const double h = T / N;
    std::vector<double> ge(N + 1), fg(N + 1);
    for (int j = 0; j <= N; ++j) {
        const double gj = g.g(f[j]);
        ge[j] = gj * std::exp(j * h);
        fg[j] = f[j] * gj;
    }
    const std::vector<double> I = grid::cumulative(ge, h);
    const double IT = I[N], eT1 = std::expm1(T);
    std::vector<double> integrand(N + 1);
    for (int j = 0; j <= N; ++j) integrand[j] = f[j] * std::exp(-j * h) * (eT1 * I[j] + IT);
    const double lhs = grid::integrate(integrand, h);
    const double rhs = eT1 * grid::integrate(fg, h);

    const double fbar = grid::integrate(f, h) / T;
    std::vector<double> dev(N + 1);
    for (int j = 0; j <= N; ++j) dev[j] = (f[j] - fbar) * (f[j] - fbar);
    // (1/2) double integral of (f(x) - f(y))^2 = T int (f - fbar)^2
    const double quad = g.theta * T * grid::integrate(dev, h);
    return finish(lhs, rhs, quad, g.increasing);
}

double ConstraintWeights::constraint_residual() const {
    const int m = n();
    double worst = 0;
    for (int i = 0; i < m; ++i) {
        double row = 0, col = 0;
        for (int l = 0; l <= i; ++l) row += b(i, l);
        for (int l = i; l < m; ++l) row += bt(i, l);
        for (int l = i; l < m; ++l) col += b(l, i);
        for (int l = 0; l <= i; ++l) col += bt(l, i);
        worst = std::max({worst, std::abs(row - c), std::abs(col - c)});
    }
    return worst;
}

double ConstraintWeights::min_entry() const {
    const int m = n();
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) {
            if (k <= i) lo = std::min(lo, b(i, k));
            if (k >= i) lo = std::min(lo, bt(i, k));
        }
    return lo;
}

ConstraintWeights canonical_weights(int n, double T) {
    if (n < 1 || !(T > 0)) throw std::invalid_argument("canonical_weights: need n >= 1 and T > 0");
    ConstraintWeights w;
    w.b = Eigen::MatrixXd::Zero(n, n);
    w.bt = Eigen::MatrixXd::Zero(n, n);
    const double h = T / n;
    for (int i = 1; i <= n; ++i)
        for (int k = 1; k <= n; ++k) {
            if (k <= i) w.b(i - 1, k - 1) = std::exp(T - (i - k) * h);
            if (k >= i) w.bt(i - 1, k - 1) = std::exp((k - i) * h);
        }
    w.c = std::expm1(T + h) / std::expm1(h);
    w.tau = w.min_entry();
    return w;
}

ConstraintWeights random_constraint_weights(int n, double T, double tau, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("random_constraint_weights: need n >= 2");
    ConstraintWeights w = canonical_weights(n, T);
    w.tau = tau;
    if (tau > w.min_entry()) {
        w.warning = true;
        return w;
    }
    // unknowns: b(i,k) for k <= i, then bt(i,k) for k >= i
    std::vector<std::pair<int, int>> lower, upper;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (k <= i) lower.emplace_back(i, k);
            if (k >= i) upper.emplace_back(i, k);
        }
    const int m = int(lower.size() + upper.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, m);
    for (int e = 0; e < int(lower.size()); ++e) {
        const auto [i, k] = lower[e];
        A(i, e) = 1;          // row sum of i
        A(n + k, e) = 1;      // column sum of k
    }
    for (int e = 0; e < int(upper.size()); ++e) {
        const auto [i, k] = upper[e];
        A(i, int(lower.size()) + e) = 1;
        A(n + k, int(lower.size()) + e) = 1;
    }
    // null space of A = orthogonal complement of range(A^T), read off a pivoted QR of A^T
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A.transpose());
    const int rank = int(qr.rank());
    const Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd N = Q.rightCols(m - rank);
    w.null_space_dim = m - rank;
    if (w.null_space_dim == 0) return w;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.2, 0.9);
    Eigen::VectorXd z(w.null_space_dim);
    for (int i = 0; i < z.size(); ++i) z[i] = normal(rng);
    Eigen::VectorXd delta = N * z;
    delta /= delta.lpNorm<Eigen::Infinity>();

    auto base = [&](int e) {
        if (e < int(lower.size())) return w.b(lower[e].first, lower[e].second);
        const auto [i, k] = upper[e - lower.size()];
        return w.bt(i, k);
    };
    double s_max = std::numeric_limits<double>::infinity();
    for (int e = 0; e < m; ++e)
        if (delta[e] < 0) s_max = std::min(s_max, (base(e) - tau) / -delta[e]);
    if (!(s_max > 0) || !std::isfinite(s_max)) return w;
    const double s = unif(rng) * s_max;
    for (int e = 0; e < m; ++e) {
        if (e < int(lower.size()))
            w.b(lower[e].first, lower[e].second) += s * delta[e];
        else
            w.bt(upper[e - lower.size()].first, upper[e - lower.size()].second) += s * delta[e];
    }
    w.perturbation_scale = s;
    return w;
}

InequalityReport discrete_inequality(const std::vector<double>& a, const ConstraintWeights& w, const GFunction& g) {
    const int n = w.n();
    if (int(a.size()) != n) throw std::invalid_argument("discrete_inequality: size mismatch");
    if (w.constraint_residual() > 1e-10 * std::max(1.0, std::abs(w.c)))
        throw std::invalid_argument("discrete_inequality: weights violate the sum constraints");
    if (w.min_entry() < w.tau * (1 - 1e-12))
        throw std::invalid_argument("discrete_inequality: weights fall below the floor tau");
    for (double x : a)
        if (!(x > 0) || x > g.L * (1 + 1e-12)) throw std::invalid_argument("discrete_inequality: a must lie in (0, L]");

    std::vector<double> ga(n);
    for (int i = 0; i < n; ++i) ga[i] = g.g(a[i]);
    double W = 0, base = 0, mean = 0;
    for (int i = 0; i < n; ++i) {
        double s = 0;
        for (int k = 0; k <= i; ++k) s += ga[k] * w.b(i, k);
        for (int k = i; k < n; ++k) s += ga[k] * w.bt(i, k);
        W += a[i] * s;
        base += a[i] * ga[i];
        mean += a[i];
    }
    mean /= n;
    double dev = 0;
    for (double x : a) dev += (x - mean) * (x - mean);
    // sum over all ordered pairs of (a_i - a_k)^2 = 2 n sum (a_i - mean)^2
    const double quad = 0.5 * g.theta * w.tau * 2.0 * n * dev;
    return finish(W, w.c * base, quad, g.increasing);
}

BridgeResult riemann_bridge(const std::function<double(double)>& f, double T, const GFunction& g,
                            const std::vector<int>& ns, int quadrature_n) {
    BridgeResult out;
    std::vector<double> fs(quadrature_n + 1);
    for (int j = 0; j <= quadrature_n; ++j) fs[j] = f(T * j / quadrature_n);
    const InequalityReport cont = continuous_inequality(fs, T, g);
    out.continuous_gap = cont.lhs - cont.rhs;
    for (int n : ns) {
        const ConstraintWeights w = canonical_weights(n, T);
        std::vector<double> a(n);
        for (int i = 1; i <= n; ++i) a[i - 1] = f(T * i / n);
        const InequalityReport r = discrete_inequality(a, w, g);
        const double h = T / n;
        out.n.push_back(n);
        out.scaled_gap.push_back(h * h * (r.lhs - r.rhs));
        out.error.push_back(std::abs(out.scaled_gap.back() - out.continuous_gap));
    }
    if (out.error.size() >= 2) {
        const std::size_t k = out.error.size();
        out.observed_order = std::log2(out.error[k - 2] / out.error[k - 1]);
    }
    return out;
}

namespace {

GFunction random_family(std::mt19937_64& rng, int pick, double& L) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (pick) {
        case 0:
            L = 0.3 + 1.2 * u(rng);
            return inverse_sine_g(L);
        case 1: {
            L = 0.5 + 2.5 * u(rng);
            const double k = 0.2 + 2.8 * u(rng);
            return exponential_g(k, L);
        }
        case 2: {
            L = 0.5 + 2.5 * u(rng);
            return linear_g(2 * u(rng), 0.1 + 1.9 * u(rng), L);
        }
        default:
            L = 0.5 + 1.5 * u(rng);
            return cubic_g(L);
    }
}

}  // namespace

SuiteReport run_inequality_suite(const SuiteOptions& opt) {
    SuiteReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();
    auto record = [&](const char* kind, int i, std::uint64_t cs, const GFunction& g, const InequalityReport& r,
                      bool constant) {
        const double margin = (r.gap - r.quadratic_term) / std::max(std::abs(r.lhs), 1.0);
        rep.min_margin = std::min(rep.min_margin, margin);
        if (constant) {
            ++rep.equality_cases;
            if (r.equality) ++rep.equality_detected;
        }
        if (!r.pass) rep.failures.push_back({kind, i, cs, g.name, r.gap, r.quadratic_term, r.slack});
    };

    for (int i = 0; i < opt.discrete_cases; ++i) {
        const std::uint64_t cs = opt.seed + std::uint64_t(i);
        std::mt19937_64 rng(cs);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const int n = 2 + int(u(rng) * 11);
        const double T = 0.3 + 2.7 * u(rng);
        const double tau = 0.2 + 0.75 * u(rng);
        double L = 1;
        const GFunction g = random_family(rng, i % 4, L);
        const bool constant = i % 10 == 9;
        std::vector<double> a(n);
        const double a0 = L * (0.05 + 0.95 * u(rng));
        for (double& x : a) x = constant ? a0 : L * (0.05 + 0.95 * u(rng));
        const ConstraintWeights w = random_constraint_weights(n, T, tau, cs ^ 0x9e3779b97f4a7c15ULL);
        record("discrete", i, cs, g, discrete_inequality(a, w, g), constant);
        ++rep.discrete_run;
    }

    constexpr int kSamples = 2048;
    for (int i = 0; i < opt.continuous_cases; ++i) {
        const std::uint64_t cs = opt.seed + 1000003ULL + std::uint64_t(i);
        std::mt19937_64 rng(cs);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double T = 0.3 + 2.7 * u(rng);
        double L = 1;
        const int pick = i % 5;
        GFunction g;
        if (pick == 4) {
            const double theta = 0.1 + 1.9 * u(rng);
            L = 0.5 + 2.5 * u(rng);
            g = increasing_linear_g(theta, L);
        } else {
            g = random_family(rng, pick, L);
        }
        const bool constant = i % 10 == 9;
        // random trigonometric shape mapped into [lo, hi] within (0, L]
        double amp[3], ph[3];
        for (int m = 0; m < 3; ++m) {
            amp[m] = u(rng);
            ph[m] = 2 * std::numbers::pi * u(rng);
        }
        const double lo = L * (0.05 + 0.45 * u(rng)), hi = lo + (L - lo) * u(rng);
        std::vector<double> raw(kSamples + 1);
        for (int j = 0; j <= kSamples; ++j) {
            const double x = T * j / kSamples;
            double s = 0;
            for (int m = 0; m < 3; ++m) s += amp[m] * std::sin(2 * std::numbers::pi * (m + 1) * x / T + ph[m]);
            raw[j] = s;
        }
        const auto [rmin, rmax] = std::minmax_element(raw.begin(), raw.end());
        std::vector<double> f(kSamples + 1);
        for (int j = 0; j <= kSamples; ++j)
            f[j] = constant || *rmax == *rmin ? lo : lo + (hi - lo) * (raw[j] - *rmin) / (*rmax - *rmin);
        record("continuous", i, cs, g, continuous_inequality(f, T, g), constant);
        ++rep.continuous_run;
    }
    return rep;
}

}  // namespace flamespeed
