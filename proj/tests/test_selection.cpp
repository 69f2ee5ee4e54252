#include <doctest.h>

#include <cmath>

#include "flamespeed/selection.hpp"
#include "support.hpp"

using namespace flamespeed;
using testing_support::kPi;

namespace {
NormalizedProblem preset(const char* name, double mu = 0.1) {
    return normalize(build_flow(flow_preset(name)), {1.0, mu});
}
}  // namespace

TEST_CASE("x_bar is the flattest maximum") {
    const SelectedMaximum a = select_xbar(locate_maxima(build_flow(flow_preset("single-well"))));
    CHECK(a.x_bar == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.slope_target == doctest::Approx(-2 * kPi).epsilon(1e-12));
    const SelectedMaximum b = select_xbar(locate_maxima(build_flow(flow_preset("two-max-distinct"))));
    CHECK(b.x_bar == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b.slope_target == doctest::Approx(-2 * kPi).epsilon(1e-12));
}

TEST_CASE("tied curvatures are refused") {
    CHECK_THROWS_WITH_AS(select_xbar(locate_maxima(build_flow(flow_preset("two-max-tied")))),
                         "selection ill-posed: maxima with equal curvature", SelectionRefused);
    CHECK_THROWS_AS(physical_fluctuation(preset("two-max-tied")), SelectionRefused);
    CHECK_THROWS_AS(verify_selection(preset("two-max-tied"), {0.1}), SelectionRefused);
}

TEST_CASE("selected profile in the trapped regime") {
    const SelectionResult r = physical_fluctuation(preset("two-max-distinct"));
    CHECK(r.regime == Regime::trapped);
    CHECK(r.x_bar == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.x_mu == doctest::Approx(1.0953577638973864674).epsilon(1e-12));
    REQUIRE(r.local_minima.size() == 1);
    CHECK(r.local_minima[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.x.size() == r.w0.size());
}

TEST_CASE("unique regime reports the unique solution") {
    const SelectionResult r = physical_fluctuation(preset("two-max-distinct", 3.0));
    CHECK(r.regime == Regime::unique);
    CHECK_FALSE(r.trapped);
    CHECK(r.H0_norm > 1.0);
    CHECK(r.local_minima.empty());
    // Unique regime needs no maximum set, so verify_selection refuses
    CHECK_THROWS_AS(verify_selection(preset("two-max-distinct", 3.0), {0.1}), SelectionRefused);
}

TEST_CASE("viscous correctors converge to the selected branch") {
    for (const char* name : {"single-well", "two-max-distinct"}) {
        CAPTURE(name);
        const SelectionCheck c = verify_selection(preset(name), {0.1, 0.01, 0.001});
        REQUIRE(c.distances.size() == 3);
        CHECK(c.distances.back() <= 0.05);
        CHECK(c.monotone);
        for (std::size_t i = 1; i < 3; ++i) CHECK(c.distances[i] < c.distances[i - 1]);
        if (!c.wrong_distances.empty()) CHECK(c.wrong_distances.back() >= 10 * c.distances.back());
    }
}

TEST_CASE("frozen selection distances") {
    const SelectionCheck c = verify_selection(preset("single-well"), {0.1, 0.01, 0.001});
    CHECK(c.distances[0] == doctest::Approx(0.299).epsilon(1e-2));
    CHECK(c.distances[1] == doctest::Approx(0.0358).epsilon(1e-2));
    CHECK(c.distances[2] == doctest::Approx(3.71e-3).epsilon(1e-2));
    CHECK(c.wrong_distances.empty());
}

TEST_CASE("Richardson helpers") {
    // q(d) = L + c d^r
    auto q = [](double d, double r) { return -3.0 + 0.7 * std::pow(d, r); };
    for (double r : {0.5, 1.0, 1.5, 2.0}) {
        CHECK(observed_order({1e-3, 2e-3, 4e-3}, {q(1e-3, r), q(2e-3, r), q(4e-3, r)}) ==
              doctest::Approx(r).epsilon(1e-8));
        CHECK(richardson(1e-3, q(1e-3, r), 2e-3, q(2e-3, r), r) == doctest::Approx(-3.0).epsilon(1e-12));
    }
    CHECK(observed_order({1e-3, 2e-3, 5e-3}, {1, 2, 3}) == 1.0);
    CHECK(observed_order({1e-3, 2e-3, 4e-3}, {1, 2, 1.5}) == 1.0);
}

TEST_CASE("slope of (H - 1)/d approaches -sqrt of the flattest curvature") {
    for (const char* name : {"single-well", "two-max-distinct"}) {
        CAPTURE(name);
        const SlopeDiagnostic s = slope_diagnostic(preset(name), {4e-3, 2e-3, 1e-3});
        CHECK(s.slope_target == doctest::Approx(-2 * kPi).epsilon(1e-12));
        CHECK(s.relative_error <= 0.10);
        CHECK(s.relative_error <= 1e-3);
        for (double qv : s.quotients) CHECK(qv < 0);
    }
}

TEST_CASE("slope diagnostic at coarser d") {
    const SlopeDiagnostic s = slope_diagnostic(preset("two-max-distinct"), {1e-2, 5e-3, 2.5e-3});
    CHECK(s.relative_error <= 0.10);
}

TEST_CASE("selection is invariant under a constant shift of the flow") {
    const FlowSpec s = flow_preset("two-max-distinct");
    const NormalizedProblem a = normalize(build_flow(s), {1.0, 0.1});
    const NormalizedProblem b = normalize(build_flow(s.shifted(2.5)), {1.0, 0.1});
    const SelectionResult ra = physical_fluctuation(a), rb = physical_fluctuation(b);
    CHECK(ra.x_bar == doctest::Approx(rb.x_bar).epsilon(1e-12));
    CHECK(ra.x_mu == doctest::Approx(rb.x_mu).epsilon(1e-12));
    const double da = verify_selection(a, 0.01), db = verify_selection(b, 0.01);
    CHECK(da == doctest::Approx(db).epsilon(1e-8));
}
