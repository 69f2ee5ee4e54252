/** \file    grid.hpp
    \brief   Uniform-grid calculus shared by the solvers and the quadrature-based diagnostics.

    Periodic data live on x_j = j/N, j = 0..N-1.  Non-periodic data on an interval
    carry both endpoints (N+1 samples).  Derivatives use 8th-order centered differences,
    cumulative integrals use 6-point Lagrange interval rules (6th order).
*/
#pragma once

#include <span>
#include <vector>

namespace flamespeed::grid {

/// Coefficients c_1..c_4 of the 8th-order first derivative: f' ~ sum c_s (f_{j+s} - f_{j-s}) / h
inline constexpr double kD1[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
/// Coefficients c_0..c_4 of the 8th-order second derivative
inline constexpr double kD2[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
inline constexpr int kStencilHalfWidth = 4;

std::vector<double> periodic_derivative(std::span<const double> f);
std::vector<double> periodic_second_derivative(std::span<const double> f);

double periodic_mean(std::span<const double> f);

/** Running integral of periodic samples over one period: returns N+1 values with
    F[0] = 0 and F[N] = h * sum f (the trapezoid value of the full integral). */
std::vector<double> cumulative_periodic(std::span<const double> f);

/** Running integral of N+1 samples covering [a, a + N h]; returns N+1 values, F[0] = 0. */
std::vector<double> cumulative(std::span<const double> f, double h);

/// Full integral of N+1 samples with spacing h.
double integrate(std::span<const double> f, double h);

/// Periodic samples extended with the value at x = 1 (N+1 samples).
std::vector<double> close_period(std::span<const double> f);

/// Smallest power of two >= n.
int next_pow2(int n);
bool is_pow2(int n);

}  // namespace flamespeed::grid
