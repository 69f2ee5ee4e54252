/** \file    inequalities.hpp
    \brief   Numerical checks of the inequalities behind the monotonicity of the flame speed.

    Three levels:
      - the A/B/C functionals of a periodic profile phi, whose gap A + B - C is the
        numerator of the dE/dd quotient, and the split estimate against phi_+ = max(phi, 0);
      - the weighted discrete inequality
            W(a) = sum_i a_i sum_{k<=i} g(a_k) b_ik + sum_i a_i sum_{k>=i} g(a_k) bt_ik
                 >= c sum_i a_i g(a_i) + (theta tau / 2) sum_{i,k} (a_i - a_k)^2
        for weights with common row/column sums c and entries >= tau;
      - its continuous limit on [0, T] with the exponential kernel.
*/
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace flamespeed {

struct AbcValues {
    double A = 0, B = 0, C = 0;
    double gap = 0;     ///< A + B - C
    double h1 = 0;      ///< (1/d) int_0^1 phi sqrt(1 + phi^2)
};

/** A, B, C for periodic samples phi(j/N), with h(x) = (1/d) int_0^x phi sqrt(1 + phi^2).
    d = 1 gives the functionals of the unit-Markstein problem. */
AbcValues abc_functionals(const std::vector<double>& phi, double d = 1.0);

struct InequalityReport {
    double lhs = 0;
    double rhs = 0;              ///< right side without the quadratic term
    double gap = 0;              ///< oriented so that the claim is gap >= quadratic_term
    double quadratic_term = 0;
    double slack = 0;            ///< 1e-9 max(|lhs|, |rhs|, 1)
    bool pass = false;           ///< gap >= quadratic_term - slack
    bool equality = false;       ///< |gap| <= slack
};

struct SplitReport {
    InequalityReport report;     ///< lhs = gap(phi), rhs = exp(h^-(1)) gap(phi_+)
    bool reflected = false;      ///< phi was replaced by -phi(-x) to make h(1) >= 0
    bool nonnegative = false;    ///< phi >= 0 everywhere (equality expected)
    double h_minus_1 = 0;
};

/** Split estimate gap(phi) >= exp(h^-(1)) gap(phi_+), computed for the profile
    with h(1) >= 0 (reflecting when needed).  The quadratic term is 0. */
SplitReport split_inequality_check(const std::vector<double>& phi, double d = 1.0);

/// Periodic reflection phi(x) -> -phi(-x) on the grid j/N.
std::vector<double> reflect_profile(const std::vector<double>& phi);

/** g together with a certified bound on its slope over (0, L]:
    decreasing: g' <= -theta; increasing: g' >= theta. */
struct GFunction {
    std::string name;
    std::function<double(double)> g;
    double theta = 0;
    double L = 0;                ///< arguments must lie in (0, L]
    bool increasing = false;
};

/// 1/sin y on (0, L], L < pi/2; theta = cos L / sin^2 L.
GFunction inverse_sine_g(double L);
/// 1/sin y on (0, arctan M] with theta = 1/sqrt(1 + M^2) (weaker than the sharp bound).
GFunction inverse_sine_g_canonical(double M);
/// exp(-k y) on (0, L]; theta = k exp(-k L).
GFunction exponential_g(double k, double L);
/// A - theta y.
GFunction linear_g(double A, double theta, double L);
/// 1 - y^3, theta = 0.
GFunction cubic_g(double L);
/// theta y (increasing).
GFunction increasing_linear_g(double theta, double L);

/** Continuous inequality on [0, T] for N+1 samples f(iT/N), f > 0, max f <= g.L.
    Decreasing g:  e^T int f e^{-x} int_0^x g(f) e^y + int f e^{-x} int_x^T g(f) e^y
                   >= (e^T - 1) int f g(f) + (theta/2) int int (f(x) - f(y))^2.
    Increasing g reverses the inequality and the sign of the quadratic term; gap is then rhs - lhs.
    Throws std::invalid_argument when f is not positive or exceeds L. */
InequalityReport continuous_inequality(const std::vector<double>& f, double T, const GFunction& g);

/** Weights b (lower triangle incl. diagonal) and bt (upper triangle incl. diagonal)
    with every row sum and column sum of the combined pattern equal to c. */
struct ConstraintWeights {
    Eigen::MatrixXd b, bt;
    double c = 0;
    double tau = 0;
    double perturbation_scale = 0;  ///< 0 means the canonical instance
    bool warning = false;           ///< tau exceeded the canonical minimum; perturbation disabled
    int null_space_dim = 0;

    int n() const { return int(b.rows()); }
    /// largest |row or column sum - c|
    double constraint_residual() const;
    double min_entry() const;
};

/// b_ik = e^{T - x_i + x_k}, bt_ik = e^{x_k - x_i}, x_i = iT/n; c = (e^{T+T/n} - 1)/(e^{T/n} - 1).
ConstraintWeights canonical_weights(int n, double T);

/** Canonical weights plus a random element of the null space of the 2n sum constraints,
    scaled so every entry stays >= tau.  Deterministic in seed. */
ConstraintWeights random_constraint_weights(int n, double T, double tau, std::uint64_t seed);

/** Discrete inequality for a in (0, L]^n.  Throws std::invalid_argument when the weights break
    the sum constraints (relative 1e-10) or the floor tau. */
InequalityReport discrete_inequality(const std::vector<double>& a, const ConstraintWeights& w, const GFunction& g);

struct BridgeResult {
    std::vector<int> n;
    std::vector<double> scaled_gap;     ///< (T/n)^2 (W - c sum a g) on the canonical weights
    std::vector<double> error;          ///< |scaled_gap - continuous gap|
    double continuous_gap = 0;
    double observed_order = 0;          ///< log2 of the last error ratio
};

/** Discrete gaps with a_i = f(x_i) against the continuous gap as n doubles. */
BridgeResult riemann_bridge(const std::function<double(double)>& f, double T, const GFunction& g,
                            const std::vector<int>& ns, int quadrature_n = 1 << 14);

struct SuiteOptions {
    int discrete_cases = 1000;
    int continuous_cases = 200;
    std::uint64_t seed = 20240601;
};

struct SuiteFailure {
    std::string kind;           ///< "discrete" or "continuous"
    int index = 0;
    std::uint64_t case_seed = 0;
    std::string g_name;
    double gap = 0, quadratic_term = 0, slack = 0;
};

struct SuiteReport {
    int discrete_run = 0, continuous_run = 0;
    int equality_cases = 0;             ///< constant inputs, all must report equality
    int equality_detected = 0;
    double min_margin = 0;              ///< min over cases of (gap - quadratic_term) / max(|lhs|, 1)
    std::vector<SuiteFailure> failures;
    bool ok() const { return failures.empty() && equality_detected == equality_cases; }
};

/** Randomized suite: case i uses seed + i, so any failure is reproducible from its case seed. */
SuiteReport run_inequality_suite(const SuiteOptions& opt);

}  // namespace flamespeed
