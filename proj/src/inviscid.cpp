#include "flamespeed/inviscid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace flamespeed {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr unsigned kMaxDepth = 18;
constexpr unsigned kShortDepth = 3;

std::vector<double> maxima_locations(const FlowProfile& flow) {
    std::vector<double> out;
    if (flow.is_constant()) return out;
    for (const auto& p : locate_maxima(flow).points) out.push_back(p.x);
    return out;
}

/// Parameter t in [anchor, anchor + 1) corresponding to x in [0, 1).
double lift(double x, double anchor) { return x >= anchor ? x : x + 1.0; }

struct Profile {
    std::vector<double> omega;  ///< omega(x_j), not yet shifted
    std::vector<double> slope;  ///< u'(x_j)
};

/** omega at sorted points xs in [0,1).  In the trapped regime u(t) rises from the anchor up to
    x_mu and falls afterwards; in the unique regime anchor = 0 and x_mu = 1. */
Profile evaluate_profile(const SlopeIntegral& S, double m, double anchor, double x_mu,
                         std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> t(n);
    for (std::size_t j = 0; j < n; ++j) t[j] = lift(xs[j], anchor);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });

    const double C_mu = S(anchor, x_mu);
    Profile out{std::vector<double>(n), std::vector<double>(n)};
    double prev_t = anchor, C = 0;
    for (std::size_t idx : order) {
        const double tj = t[idx];
        // integrate up to x_mu and past it separately so no panel straddles the kink
        if (prev_t < x_mu && tj > x_mu) {
            C = C_mu + S(x_mu, tj);
        } else {
            C += S(prev_t, tj);
        }
        prev_t = tj;
        const double u = tj <= x_mu ? C : 2 * C_mu - C;
        out.omega[idx] = u - m * tj;
        out.slope[idx] = (tj <= x_mu ? 1.0 : -1.0) * S.integrand(tj);
    }
    return out;
}

}  // namespace

const char* to_string(Regime r) { return r == Regime::unique ? "unique" : "trapped"; }

SlopeIntegral::SlopeIntegral(const NormalizedProblem& problem, double H, const InviscidTolerances& tol)
    : flow_(problem.flow), H_(H), tol_(tol), breaks_(maxima_locations(problem.flow)) {
    if (!(H >= 1.0)) throw std::invalid_argument("SlopeIntegral: H must be >= 1");
    period_ = (*this)(0.0, 1.0);
}

double SlopeIntegral::integrand(double y) const {
    // (H - v)^2 - 1 = (H - 1 - v)(H + 1 - v), factored to keep accuracy where v ~ 0 and H ~ 1
    const double a = (H_ - 1.0) - flow_.value(y);
    return std::sqrt(std::max(0.0, a * (a + 2.0)));
}

double SlopeIntegral::panel(double a, double b) const {
    if (b <= a) return 0.0;
    // short panels inside a smooth piece are exact to rounding with one or two GK levels;
    // letting them recurse only chases round-off in the error estimate
    const unsigned depth = b - a > 1.0 / 16 ? kMaxDepth : kShortDepth;
    return GK::integrate([this](double y) { return integrand(y); }, a, b, depth, tol_.quad_tol);
}

double SlopeIntegral::operator()(double a, double b) const {
    if (b < a) return -(*this)(b, a);
    std::vector<double> cuts{a};
    for (long k = long(std::floor(a)) - 1; k <= long(std::ceil(b)); ++k)
        for (double x : breaks_) {
            const double c = double(k) + x;
            if (c > a && c < b) cuts.push_back(c);
        }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double s = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += panel(cuts[i], cuts[i + 1]);
    return s;
}

double SlopeIntegral::period_derivative() const {
    if (H_ == 1.0 && !breaks_.empty()) return std::numeric_limits<double>::infinity();
    auto f = [this](double y) {
        const double s = integrand(y);
        return s > 0 ? (H_ - flow_.value(y)) / s : std::numeric_limits<double>::infinity();
    };
    std::vector<double> cuts{0.0};
    cuts.insert(cuts.end(), breaks_.begin(), breaks_.end());
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    double s = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i]) s += GK::integrate(f, cuts[i], cuts[i + 1], kMaxDepth, tol_.quad_tol);
    return s;
}

double inviscid_threshold(const NormalizedProblem& problem, const InviscidTolerances& tol) {
    return SlopeIntegral(problem, 1.0, tol).period();
}

InviscidResult solve_inviscid_H(const NormalizedProblem& problem, const InviscidTolerances& tol) {
    InviscidResult r;
    const double m = problem.phi_mean();
    r.mu_star_norm = inviscid_threshold(problem, tol);
    r.mu_star = problem.gamma * r.mu_star_norm;

    if (m < r.mu_star_norm) {
        r.regime = Regime::trapped;
        r.H0_norm = 1.0;
    } else {
        r.regime = Regime::unique;
        auto F = [&](double H) { return SlopeIntegral(problem, H, tol).period() - m; };
        // F(1) <= 0 and F(H) >= sqrt(H^2 - 1) - m > 0 at H = 2 + m
        double lo = 1.0, hi = 2.0 + m;
        if (F(hi) <= 0) throw std::runtime_error("solve_inviscid_H: root bracket failure");
        if (F(lo) == 0) {
            hi = lo;
        }
        // bisection until Newton is safe (dF/dH blows up logarithmically at H = 1)
        while (hi - lo > tol.root_tol && (lo - 1.0 < tol.newton_switch || hi - lo > 1e-2)) {
            const double mid = 0.5 * (lo + hi);
            (F(mid) > 0 ? hi : lo) = mid;
        }
        double H = 0.5 * (lo + hi);
        if (hi - lo > tol.root_tol) {
            auto fdf = [&](double x) {
                const SlopeIntegral S(problem, x, tol);
                return std::make_pair(S.period() - m, S.period_derivative());
            };
            std::uintmax_t iters = 50;
            H = boost::math::tools::newton_raphson_iterate(fdf, H, lo, hi, 50, iters);
        }
        r.H0_norm = H;
        r.residual = std::abs(F(H));
    }
    r.H0 = problem.H_from_E(r.H0_norm);
    return r;
}

double turning_point(const NormalizedProblem& problem, double anchor, const InviscidTolerances& tol) {
    const double m = problem.phi_mean();
    const SlopeIntegral S(problem, 1.0, tol);
    const double total = S.period();
    if (!(m < total)) throw std::invalid_argument("turning_point: no turning point in the unique regime");
    // G(t) = int_anchor^t S - int_t^{anchor+1} S - m is increasing from -total - m to total - m
    auto G = [&](double t) { return 2 * S(anchor, t) - total - m; };
    auto stop = [&](double a, double b) { return std::abs(b - a) <= tol.root_tol; };
    std::uintmax_t iters = 200;
    double lo = anchor, hi = anchor + 1.0;
    const auto [a, b] = boost::math::tools::toms748_solve(G, lo, hi, G(lo), G(hi), stop, iters);
    return 0.5 * (a + b);
}

std::vector<double> branch_profile(const NormalizedProblem& problem, const InviscidResult& H0, double anchor,
                                   std::span<const double> xs, const InviscidTolerances& tol) {
    const double m = problem.phi_mean();
    const SlopeIntegral S(problem, H0.H0_norm, tol);
    double x_mu = 1.0;
    if (H0.regime == Regime::trapped) {
        x_mu = turning_point(problem, anchor, tol);
    } else {
        anchor = 0.0;
    }
    std::vector<double> pts(xs.begin(), xs.end());
    pts.push_back(0.0);
    const Profile p = evaluate_profile(S, m, anchor, x_mu, pts);
    const double w0 = p.omega.back();
    std::vector<double> w(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) w[j] = problem.gamma * (p.omega[j] - w0);
    return w;
}

namespace {

std::vector<double> refined_samples(const InviscidTolerances& tol, const std::vector<double>& kinks) {
    const int n = tol.base_samples;
    const double h = 1.0 / n, hf = h / tol.refine_factor;
    std::vector<double> xs;
    for (int j = 0; j < n; ++j) xs.push_back(j * h);
    const int steps = int(std::ceil(tol.refine_radius / hf));
    for (double k : kinks) {
        xs.push_back(wrap_unit(k));
        for (int s = -steps; s <= steps; ++s) xs.push_back(wrap_unit(k + s * hf));
    }
    std::sort(xs.begin(), xs.end());
    std::vector<double> out;
    for (double x : xs)
        if (x < 1.0 && (out.empty() || x - out.back() > 1e-14)) out.push_back(x);
    return out;
}

BranchSolution build_branch(const NormalizedProblem& problem, const InviscidResult& res, double anchor,
                            const std::vector<double>& maxima, const InviscidTolerances& tol) {
    const double m = problem.phi_mean();
    const SlopeIntegral S(problem, res.H0_norm, tol);
    BranchSolution b;
    b.anchor = anchor;
    b.turning_point = res.regime == Regime::trapped ? turning_point(problem, anchor, tol) : 1.0;

    std::vector<double> kinks = maxima;
    if (res.regime == Regime::trapped) kinks.push_back(b.turning_point);
    b.x = refined_samples(tol, kinks);
    const double anchor_eval = res.regime == Regime::trapped ? anchor : 0.0;
    const Profile p = evaluate_profile(S, m, anchor_eval, b.turning_point, b.x);
    const double w0 = p.omega.front();  // x[0] = 0
    b.w.resize(b.x.size());
    for (std::size_t j = 0; j < b.x.size(); ++j) b.w[j] = problem.gamma * (p.omega[j] - w0);
    b.slope = p.slope;

    auto on_maxima = [&](double x) {
        return std::any_of(maxima.begin(), maxima.end(), [&](double c) {
            const double dist = std::abs(x - c);
            return std::min(dist, 1.0 - dist) < 1e-9;
        });
    };
    for (std::size_t j = 0; j < b.x.size(); ++j) {
        if (on_maxima(b.x[j])) continue;
        const double r = std::sqrt(1 + b.slope[j] * b.slope[j]) + problem.flow.value(b.x[j]) - res.H0_norm;
        b.equation_residual = std::max(b.equation_residual, std::abs(r));
    }
    // omega(1) from the same cumulative construction
    {
        const double t_end = anchor_eval + 1.0;
        const double C_mu = S(anchor_eval, b.turning_point);
        const double u_end = res.regime == Regime::trapped ? 2 * C_mu - S.period() : S.period();
        const double omega_end = u_end - m * t_end;
        const double omega_start = -m * anchor_eval;
        b.periodicity_defect = std::abs(omega_end - omega_start);
    }
    // local minima of u = m x + omega, with u(x - 1) = u(x) - m across the period seam
    const std::size_t n = b.x.size();
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = m * b.x[j] + b.w[j] / problem.gamma;
    for (std::size_t j = 0; j < n; ++j) {
        const double up = j == 0 ? u[n - 1] - m : u[j - 1];
        const double un = j + 1 == n ? u[0] + m : u[j + 1];
        if (u[j] < up && u[j] < un) b.local_minima.push_back(b.x[j]);
    }
    b.kinks_ok = std::all_of(b.local_minima.begin(), b.local_minima.end(), on_maxima);
    return b;
}

}  // namespace

InviscidResult enumerate_solutions(const NormalizedProblem& problem, const InviscidTolerances& tol) {
    InviscidResult res = solve_inviscid_H(problem, tol);
    const std::vector<double> maxima = maxima_locations(problem.flow);
    if (res.regime == Regime::trapped) {
        if (maxima.empty()) throw std::invalid_argument("enumerate_solutions: maximum set is not finite");
        for (double x : maxima) res.branches.push_back(build_branch(problem, res, x, maxima, tol));
    } else {
        res.branches.push_back(build_branch(problem, res, 0.0, maxima, tol));
    }
    return res;
}

}  // namespace flamespeed
