#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "flamespeed/flow_model.hpp"
#include "flamespeed/problem.hpp"
#include "support.hpp"

using namespace flamespeed;
using testing_support::kPi;
using testing_support::kTwoPi;

TEST_CASE("single-well preset: mean, max and curvature") {
    const FlowProfile f = build_flow(flow_preset("single-well"));
    CHECK(f.mean() == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(f.max_value()) <= 1e-12);
    CHECK(f.min_value() == doctest::Approx(-2.0).epsilon(1e-12));
    const MaximaSet m = locate_maxima(f);
    REQUIRE(m.points.size() == 1);
    CHECK(std::abs(m.points[0].x) <= 1e-12);
    CHECK(m.points[0].neg_curvature == doctest::Approx(4 * kPi * kPi).epsilon(1e-12));
    CHECK(m.is_finite);
    CHECK(m.nondegenerate);
}

TEST_CASE("constant flow is flagged and has no finite maximum set") {
    const FlowProfile f = build_flow(FlowSpec{});
    CHECK(f.is_constant());
    CHECK(f.mean() == 0.0);
    CHECK(f.max_value() == 0.0);
    CHECK_THROWS_AS(locate_maxima(f), std::invalid_argument);
    const FlowProfile g = build_flow(flow_preset("constant"));
    CHECK(g.is_constant());
}

TEST_CASE("two-max-distinct preset matches its factored form") {
    const FlowProfile f = build_flow(flow_preset("two-max-distinct"));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 200; ++i) {
        const double y = u(rng);
        const double s = std::sin(kTwoPi * y);
        CHECK(f(y) == doctest::Approx(-s * s * (1 + 0.5 * std::cos(kTwoPi * y))).epsilon(1e-14));
    }
    const MaximaSet m = locate_maxima(f);
    REQUIRE(m.points.size() == 2);
    CHECK(std::abs(m.points[0].x) <= 1e-12);
    CHECK(m.points[1].x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.points[0].neg_curvature == doctest::Approx(12 * kPi * kPi).epsilon(1e-12));
    CHECK(m.points[1].neg_curvature == doctest::Approx(4 * kPi * kPi).epsilon(1e-12));
    CHECK(m.curvatures_distinct);
}

TEST_CASE("two-max-tied preset has equal curvatures") {
    const MaximaSet m = locate_maxima(build_flow(flow_preset("two-max-tied")));
    REQUIRE(m.points.size() == 2);
    CHECK(m.points[0].neg_curvature == doctest::Approx(8 * kPi * kPi).epsilon(1e-12));
    CHECK(m.points[1].neg_curvature == doctest::Approx(8 * kPi * kPi).epsilon(1e-12));
    CHECK_FALSE(m.curvatures_distinct);
}

TEST_CASE("unknown preset is rejected") { CHECK_THROWS_AS(flow_preset("no-such-flow"), std::invalid_argument); }

TEST_CASE("derivatives are exact term-by-term derivatives") {
    FlowSpec s;
    s.cosine = {0.3, -0.2};
    s.sine = {0.1, 0.0, 0.05};
    const FlowProfile f(s);
    const double y = 0.237;
    double v = 0, dv = 0, d2v = 0;
    for (int k = 1; k <= 3; ++k) {
        const double a = k <= 2 ? s.cosine[k - 1] : 0.0, b = s.sine[k - 1], w = kTwoPi * k;
        v += a * std::cos(w * y) + b * std::sin(w * y);
        dv += w * (-a * std::sin(w * y) + b * std::cos(w * y));
        d2v += -w * w * (a * std::cos(w * y) + b * std::sin(w * y));
    }
    const FlowJet j = f.jet(y);
    CHECK(j.v == doctest::Approx(v).epsilon(1e-14));
    CHECK(j.dv == doctest::Approx(dv).epsilon(1e-14));
    CHECK(j.d2v == doctest::Approx(d2v).epsilon(1e-14));
    CHECK(f.max_wavenumber() == 3);
}

TEST_CASE("property: periodicity for random specs and points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int t = 0; t < 20; ++t) {
        const FlowProfile f(testing_support::random_flow(rng));
        for (int i = 0; i < 50; ++i) {
            const double y = u(rng);
            CHECK(std::abs(f(y + 1) - f(y)) <= 1e-12);
        }
    }
}

TEST_CASE("property: maxima and summary statistics agree with dense sampling") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 20; ++t) {
        const FlowProfile f(testing_support::random_flow(rng));
        double hi = -1e300, lo = 1e300;
        const int n = 200000;
        for (int j = 0; j < n; ++j) {
            const double v = f(double(j) / n);
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
        // dense sampling can only undershoot the maximum, by O(h^2)
        CHECK(f.max_value() >= hi - 1e-12);
        CHECK(f.max_value() - hi <= 1e-8);
        CHECK(f.min_value() <= lo + 1e-12);
        const MaximaSet m = locate_maxima(f);
        for (const auto& p : m.points) {
            CHECK(std::abs(f(p.x) - f.max_value()) <= 1e-10);
            CHECK(std::abs(f.derivative(p.x)) <= 1e-8);
            CHECK(p.neg_curvature == doctest::Approx(-f.second_derivative(p.x)));
        }
    }
}

TEST_CASE("property: maxima are invariant under constant shifts") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10; ++t) {
        const FlowSpec s = testing_support::random_flow(rng);
        const MaximaSet a = locate_maxima(FlowProfile(s));
        const MaximaSet b = locate_maxima(FlowProfile(s.shifted(3.7)));
        REQUIRE(a.points.size() == b.points.size());
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            CHECK(a.points[i].x == doctest::Approx(b.points[i].x).epsilon(1e-12));
            CHECK(a.points[i].neg_curvature == doctest::Approx(b.points[i].neg_curvature).epsilon(1e-12));
        }
    }
}

TEST_CASE("FlowSpec transformations") {
    FlowSpec s;
    s.cosine = {0.4};
    s.sine = {0.3, -0.1};
    s.offset = 0.2;
    const FlowProfile f(s), r(s.reflected()), sc(s.scaled(-2)), sh(s.shifted(1.5));
    for (double y : {0.0, 0.13, 0.5, 0.77}) {
        CHECK(r(y) == doctest::Approx(f(-y)).epsilon(1e-15));
        CHECK(sc(y) == doctest::Approx(-2 * f(y)).epsilon(1e-15));
        CHECK(sh(y) == doctest::Approx(f(y) + 1.5).epsilon(1e-15));
    }
    CHECK(wrap_unit(-0.25) == doctest::Approx(0.75));
    CHECK(wrap_unit(3.5) == doctest::Approx(0.5));
}

TEST_CASE("normalize: already canonical momentum and flow") {
    const NormalizedProblem P = normalize(build_flow(flow_preset("single-well")), {1.0, 0.3});
    CHECK(P.gamma == 1.0);
    CHECK(P.mu == 0.3);
    CHECK(std::abs(P.c_shift) <= 1e-12);
    CHECK_FALSE(P.gamma_flipped);
    CHECK_FALSE(P.reflected);
}

TEST_CASE("normalize: negative gamma flips the flow") {
    FlowSpec s;
    s.cosine = {1.0};
    const NormalizedProblem P = normalize(build_flow(s), {-1.0, 0.3});
    CHECK(P.gamma == 1.0);
    CHECK(P.gamma_flipped);
    CHECK(std::abs(P.flow.max_value()) <= 1e-12);
    CHECK(P.c_shift == doctest::Approx(1.0));  // max of -cos
    CHECK(P.flow(0.5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("normalize: constant shift bookkeeping") {
    FlowSpec s;
    s.cosine = {1.0};
    const NormalizedProblem P = normalize(build_flow(s), {2.0, 0.3});
    CHECK(P.c_shift == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(P.flow(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(P.H_from_E(0.7) == doctest::Approx(2 * (0.7 + 1.0)));
    CHECK(P.E_from_H(P.H_from_E(0.7)) == doctest::Approx(0.7));
    CHECK(P.phi_mean() == doctest::Approx(0.15));
}

TEST_CASE("normalize: negative mu reflects the flow") {
    FlowSpec s;
    s.sine = {1.0};
    const NormalizedProblem P = normalize(build_flow(s), {1.0, -0.3});
    CHECK(P.reflected);
    CHECK(P.mu == 0.3);
    CHECK(P.x_to_original(0.25) == doctest::Approx(0.75));
    const std::vector<double> a{0, 1, 2, 3};
    CHECK(P.to_original_frame(a) == std::vector<double>{0, 3, 2, 1});
}

TEST_CASE("normalize: gamma = 0 is rejected") {
    CHECK_THROWS_AS(normalize(build_flow(flow_preset("single-well")), {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("property: normalize is idempotent") {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 10; ++t) {
        const NormalizedProblem P = normalize(FlowProfile(testing_support::random_flow(rng)),
                                              testing_support::random_momentum(rng));
        const NormalizedProblem Q = normalize(P.flow, {P.gamma, P.mu});
        CHECK_FALSE(Q.gamma_flipped);
        CHECK_FALSE(Q.reflected);
        CHECK(std::abs(Q.c_shift) <= 1e-12);
        for (double y : {0.1, 0.4, 0.9}) CHECK(Q.flow(y) == doctest::Approx(P.flow(y)).epsilon(1e-13));
    }
}
