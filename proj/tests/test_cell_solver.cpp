#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "flamespeed/cell_solver.hpp"
#include "flamespeed/grid.hpp"
#include "support.hpp"

using namespace flamespeed;

namespace {

// Reference eigenvalues from the multiple-shooting oracle in tests/oracle/shooting.hpp
// (RKF78 at 1e-13, Newton to 1e-12); test_oracle_agreement re-derives them.
struct Frozen {
    const char* flow;
    double gamma, mu, d, H;
};
constexpr Frozen kSingleWell[] = {
    {"single-well", 1.0, 0.1, 4.0, 0.005385510822837},  {"single-well", 1.0, 0.1, 1.0, 0.011399972016233},
    {"single-well", 1.0, 0.1, 0.5, 0.031208902731896},  {"single-well", 1.0, 0.1, 0.25, 0.117726166572813},
    {"single-well", 1.0, 0.1, 0.1, 0.505111859704717},  {"two-max-distinct", 1.0, 0.1, 1.0, 0.505496358363014},
    {"two-max-distinct", 1.0, 0.1, 0.1, 0.561714463044955},
};

// v = 0.2 + cos 2 pi y + 0.5 sin 4 pi y in the original (unreduced) variables
FlowSpec mixed_flow() {
    FlowSpec s;
    s.cosine = {1.0};
    s.sine = {0.0, 0.5};
    s.offset = 0.2;
    return s;
}
constexpr Frozen kMixed[] = {
    {"mixed", -2.0, 0.3, 1.0, 1.635985060019045},
    {"mixed", 1.5, -0.4, 0.2, 2.129467838762098},
    {"mixed", -0.7, -1.1, 1.0, 1.171537364465902},
};

double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("degenerate direction gamma = 0 gives |mu| exactly") {
    const FlowProfile f = build_flow(flow_preset("single-well"));
    for (double mu : {1.0, -1.0, 0.3, -0.3}) {
        CHECK(effective_hamiltonian(f, {0.0, mu}, 0.5) == std::abs(mu));
        const CellSolution s = degenerate_direction_solution({0.0, mu}, 0.5, 64);
        CHECK(s.H == std::abs(mu));
        CHECK(max_abs(s.w) == 0.0);
    }
}

TEST_CASE("zero momentum and non-positive d are rejected") {
    const FlowProfile f = build_flow(flow_preset("single-well"));
    CHECK_THROWS_AS(effective_hamiltonian(f, {0.0, 0.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(effective_hamiltonian(f, {1.0, 0.0}, 0.0), std::invalid_argument);
    const NormalizedProblem P = normalize(f, {1.0, 0.1});
    CHECK_THROWS_AS(solve_cell(P, -1.0, 256), std::invalid_argument);
    CHECK_THROWS_AS(solve_cell(P, 1.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(solve_cell(P, 1.0, 32), std::invalid_argument);
}

TEST_CASE("constant flow: phi constant, w = 0, H = |p|") {
    FlowSpec s;
    s.offset = 0.0;
    for (double d : {0.1, 1.0, 10.0}) {
        const Momentum p{0.6, -0.8};
        const NormalizedProblem P = normalize(build_flow(s), p);
        const CellSolution sol = solve_cell_continuation(P, d, 128);
        CHECK(sol.H == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(max_abs(sol.w) <= 1e-13);
        for (double phi : sol.phi) CHECK(phi == doctest::Approx(P.phi_mean()).epsilon(1e-13));
        CHECK(std::abs(alpha_from_formula(sol)) <= 1e-12);
    }
}

TEST_CASE("eigenvalues agree with the shooting oracle") {
    for (const Frozen& c : kSingleWell) {
        CAPTURE(c.flow);
        CAPTURE(c.d);
        const double H = effective_hamiltonian(build_flow(flow_preset(c.flow)), {c.gamma, c.mu}, c.d);
        CHECK(std::abs(H - c.H) <= 1e-10);
    }
    for (const Frozen& c : kMixed) {
        CAPTURE(c.gamma);
        CAPTURE(c.mu);
        const double H = effective_hamiltonian(build_flow(mixed_flow()), {c.gamma, c.mu}, c.d);
        CHECK(std::abs(H - c.H) <= 1e-10);
    }
}

TEST_CASE("solution invariants: mean constraint, residual, periodic corrector") {
    const NormalizedProblem P = normalize(build_flow(flow_preset("single-well")), {1.0, 0.1});
    for (double d : {2.0, 0.3, 0.05}) {
        const CellSolution s = solve_cell_continuation(P, d);
        CHECK(std::abs(grid::periodic_mean(s.phi) - 0.1) <= 1e-10);
        CHECK(s.residual <= std::max(SolverOptions{}.tol, s.residual_floor));
        CHECK(s.w[0] == 0.0);
        // w' = gamma phi - mu integrates to zero over a period
        std::vector<double> dw(s.phi.size());
        for (std::size_t j = 0; j < dw.size(); ++j) dw[j] = P.gamma * s.phi[j] - P.mu;
        CHECK(std::abs(grid::cumulative_periodic(dw).back()) <= 1e-10);
        CHECK(s.newton_iters <= SolverOptions{}.max_iters);
    }
}

TEST_CASE("property: bounds, gradient bound and integral identity on random instances") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ud(0.2, 3.0);
    for (int t = 0; t < 20; ++t) {
        const FlowProfile f(testing_support::random_flow(rng));
        const Momentum p = testing_support::random_momentum(rng);
        const double d = ud(rng);
        CAPTURE(t);
        const NormalizedProblem P = normalize(f, p);
        const CellSolution s = solve_cell_continuation(P, d);
        const double lower = p.norm() + p.gamma * f.mean();
        const double gv_max = std::max(p.gamma * f.max_value(), p.gamma * f.min_value());
        const double gv_min = std::min(p.gamma * f.max_value(), p.gamma * f.min_value());
        CHECK(s.H >= lower - 1e-8);
        CHECK(s.H <= p.norm() + gv_max + 1e-8);
        // |mu + w'| = gamma |phi| in the canonical frame
        CHECK(P.gamma * max_abs(s.phi) <= s.H - gv_min + 1e-6);
        CHECK(mean_identity_check(s, P) <= 1e-8);
    }
}

TEST_CASE("integral identity is sensitive to a perturbed phi") {
    const NormalizedProblem P = normalize(build_flow(flow_preset("single-well")), {1.0, 0.1});
    CellSolution s = solve_cell_continuation(P, 1.0);
    CHECK(mean_identity_check(s, P) <= 1e-8);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 2e-3);
    // one-signed noise of size 1e-3 on average shifts the integral of sqrt(1 + phi^2) well above 1e-4
    for (double& x : s.phi) x += 0.1 + u(rng);
    CHECK(mean_identity_check(s, P) > 1e-4);
}

TEST_CASE("dE/dd formula agrees with finite differences and is negative") {
    for (const char* name : {"single-well", "two-max-distinct"}) {
        const NormalizedProblem P = normalize(build_flow(flow_preset(name)), {1.0, 0.1});
        for (double d : {1.0, 0.25}) {
            const int n = recommended_grid(d);
            const CellSolution s = solve_cell_continuation(P, d, n);
            const double h = 1e-3 * d;
            const CellSolution sp = solve_cell(P, d + h, n, {}, &s);
            const CellSolution sm = solve_cell(P, d - h, n, {}, &s);
            const double fd = (sp.E - sm.E) / (2 * h);
            const double a = alpha_from_formula(s);
            CAPTURE(name);
            CAPTURE(d);
            CHECK(a < 0);
            CHECK(std::abs(fd - a) / std::abs(a) <= 1e-3);
        }
    }
}

TEST_CASE("dE/dd is the same for a problem and its reflection") {
    FlowSpec s;
    s.cosine = {0.7, 0.2};
    s.sine = {0.4};
    const NormalizedProblem P = normalize(FlowProfile(s), {1.0, 0.25});
    const NormalizedProblem R = normalize(FlowProfile(s.reflected()), {1.0, -0.25});
    const double a = alpha_from_formula(solve_cell_continuation(P, 0.5));
    const double b = alpha_from_formula(solve_cell_continuation(R, 0.5));
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("sweep: strictly decreasing H for the single well") {
    const NormalizedProblem P = normalize(build_flow(flow_preset("single-well")), {1.0, 0.1});
    const SweepResult r = sweep_markstein(P, {0.25, 4, 1, 0.5, 2});
    REQUIRE(r.d_values.size() == 5);
    CHECK(std::is_sorted(r.d_values.begin(), r.d_values.end()));
    CHECK(r.monotone_decreasing);
    for (std::size_t i = 0; i < r.d_values.size(); ++i) {
        CHECK(r.dH_dd_fd[i] < 0);
        CHECK(r.dE_dd_formula[i] < 0);
        if (i) CHECK(r.H_values[i] < r.H_values[i - 1]);
    }
    CHECK(r.H_values[2] == doctest::Approx(0.011399972016233).epsilon(1e-9));
}

TEST_CASE("sweep: constant flow gives a flat curve") {
    const NormalizedProblem P = normalize(build_flow(FlowSpec{}), {1.0, 0.5});
    const SweepResult r = sweep_markstein(P, {0.5, 1, 2}, 128);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.H_values[i] == doctest::Approx(std::hypot(1.0, 0.5)).epsilon(1e-13));
        CHECK(std::abs(r.dH_dd_fd[i]) <= 1e-8);
        CHECK(std::abs(r.dE_dd_formula[i]) <= 1e-12);
    }
    CHECK_FALSE(r.monotone_decreasing);
}

TEST_CASE("sweep input validation") {
    const NormalizedProblem P = normalize(build_flow(flow_preset("single-well")), {1.0, 0.1});
    CHECK_THROWS_AS(sweep_markstein(P, {}), std::invalid_argument);
    CHECK_THROWS_AS(sweep_markstein(P, {1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(sweep_markstein(P, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("large-d limit: first-order approach to |p| + gamma mean(v) and flattening corrector") {
    const FlowProfile f = build_flow(flow_preset("two-max-distinct"));
    const Momentum p{1.3, 0.4};
    const NormalizedProblem P = normalize(f, p);
    const double limit = p.norm() + p.gamma * f.mean();
    std::vector<double> err;
    for (double d : {25.0, 50.0, 100.0}) err.push_back(std::abs(effective_hamiltonian(f, p, d, 256) - limit));
    CHECK(std::log2(err[0] / err[1]) >= 1.0 - 0.05);
    CHECK(std::log2(err[1] / err[2]) >= 1.0 - 0.05);
    const double w1 = max_abs(solve_cell_continuation(P, 1.0, 256).w);
    const double w100 = max_abs(solve_cell_continuation(P, 100.0, 256).w);
    CHECK(w100 <= 1e-2 * w1);
    CHECK(w100 <= 1e-3);
}

TEST_CASE("grid convergence at moderate d") {
    const NormalizedProblem P = normalize(build_flow(flow_preset("two-max-distinct")), {1.0, 0.1});
    for (double d : {1.0, 0.1}) {
        const int n = recommended_grid(d);
        const double a = solve_cell_continuation(P, d, n).H;
        const double b = solve_cell_continuation(P, d, 2 * n).H;
        CHECK(std::abs(a - b) <= 1e-9);
    }
}

TEST_CASE("recommended grid rule") {
    CHECK(recommended_grid(1.0) == 256);
    CHECK(recommended_grid(0.01) == 1024);
    CHECK(recommended_grid(1e-3) == 8192);
    for (double d : {3.0, 0.2, 0.004}) CHECK(grid::is_pow2(recommended_grid(d)));
}

TEST_CASE("property: the three symmetries hold end to end") {
    std::mt19937_64 rng(202);
    for (int t = 0; t < 10; ++t) {
        const FlowSpec s = testing_support::random_flow(rng, 0.8);
        std::uniform_real_distribution<double> ug(0.4, 1.5), um(0.0, 1.0), uc(-2, 2);
        const double g = ug(rng), mu = um(rng), c = uc(rng), d = 0.5;
        const double H = effective_hamiltonian(FlowProfile(s), {g, mu}, d);
        CAPTURE(t);
        CHECK(effective_hamiltonian(FlowProfile(s.scaled(-1)), {-g, mu}, d) == doctest::Approx(H).epsilon(1e-8));
        CHECK(effective_hamiltonian(FlowProfile(s.reflected()), {g, -mu}, d) == doctest::Approx(H).epsilon(1e-8));
        CHECK(effective_hamiltonian(FlowProfile(s.shifted(c)), {g, mu}, d) ==
              doctest::Approx(H + g * c).epsilon(1e-8));
    }
}

TEST_CASE("Newton failure surfaces as SolverError with the residual") {
    const NormalizedProblem P = normalize(build_flow(flow_preset("single-well")), {1.0, 0.1});
    SolverOptions opt;
    opt.max_iters = 1;
    try {
        solve_cell(P, 1e-3, 8192, opt);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.d() == 1e-3);
        CHECK(e.residual() > 0);
    }
}

TEST_CASE("dE/dd stays finite at small d and approaches the slope of the flattest maximum") {
    // the exponential weights span e^{+-700} here, so this exercises the scaled quotient
    const NormalizedProblem P = normalize(build_flow(flow_preset("two-max-distinct")), {1.0, 0.1});
    const CellSolution s = solve_cell_continuation(P, 1e-3);
    const AlphaQuotient q = alpha_quotient(s.phi, s.d);
    CHECK(q.log_scale > 700);
    CHECK(std::isfinite(q.alpha));
    CHECK(q.alpha == doctest::Approx(-6.253386118).epsilon(1e-8));
    CHECK(std::abs(q.alpha + 2 * testing_support::kPi) / (2 * testing_support::kPi) <= 1e-2);
}
