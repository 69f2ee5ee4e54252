#include "flamespeed/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace flamespeed::grid {

namespace {

using Weights = std::array<double, 6>;

/// Weights integrating the degree-5 interpolant through nodes first..first+5 over [0,1].
Weights interval_weights(int first) {
    Eigen::Matrix<double, 6, 6> vander;
    Eigen::Matrix<double, 6, 1> moments;
    for (int p = 0; p < 6; ++p) {
        for (int s = 0; s < 6; ++s) vander(p, s) = std::pow(double(first + s), p);
        moments(p) = 1.0 / (p + 1);
    }
    const Eigen::Matrix<double, 6, 1> w = vander.fullPivLu().solve(moments);
    Weights out;
    for (int s = 0; s < 6; ++s) out[s] = w(s);
    return out;
}

/// Weight tables indexed by -first (0..5): centered rule is first = -2.
const std::array<Weights, 6>& weight_table() {
    static const std::array<Weights, 6> table = [] {
        std::array<Weights, 6> t;
        for (int k = 0; k < 6; ++k) t[k] = interval_weights(-k);
        return t;
    }();
    return table;
}

}  // namespace

std::vector<double> periodic_derivative(std::span<const double> f) {
    const int n = int(f.size());
    if (n < 2 * kStencilHalfWidth + 1) throw std::invalid_argument("periodic_derivative: grid too small");
    const double inv_h = double(n);
    std::vector<double> d(n);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int k = 1; k <= kStencilHalfWidth; ++k)
            s += kD1[k - 1] * (f[(j + k) % n] - f[(j - k + n) % n]);
        d[j] = s * inv_h;
    }
    return d;
}

std::vector<double> periodic_second_derivative(std::span<const double> f) {
    const int n = int(f.size());
    if (n < 2 * kStencilHalfWidth + 1) throw std::invalid_argument("periodic_second_derivative: grid too small");
    const double inv_h2 = double(n) * double(n);
    std::vector<double> d(n);
    for (int j = 0; j < n; ++j) {
        double s = kD2[0] * f[j];
        for (int k = 1; k <= kStencilHalfWidth; ++k)
            s += kD2[k] * (f[(j + k) % n] + f[(j - k + n) % n]);
        d[j] = s * inv_h2;
    }
    return d;
}

double periodic_mean(std::span<const double> f) {
    return std::accumulate(f.begin(), f.end(), 0.0) / double(f.size());
}

std::vector<double> cumulative_periodic(std::span<const double> f) {
    const int n = int(f.size());
    if (n < 6) throw std::invalid_argument("cumulative_periodic: grid too small");
    const double h = 1.0 / n;
    const Weights& w = weight_table()[2];
    std::vector<double> out(n + 1, 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int k = 0; k < 6; ++k) s += w[k] * f[((j - 2 + k) % n + n) % n];
        out[j + 1] = out[j] + h * s;
    }
    return out;
}

std::vector<double> cumulative(std::span<const double> f, double h) {
    const int n = int(f.size()) - 1;
    if (n < 5) throw std::invalid_argument("cumulative: need at least 6 samples");
    const auto& table = weight_table();
    std::vector<double> out(n + 1, 0.0);
    for (int j = 0; j < n; ++j) {
        const int first = std::clamp(-2, -j, n - j - 5);
        const Weights& w = table[-first];
        double s = 0;
        for (int k = 0; k < 6; ++k) s += w[k] * f[j + first + k];
        out[j + 1] = out[j] + h * s;
    }
    return out;
}

double integrate(std::span<const double> f, double h) { return cumulative(f, h).back(); }

std::vector<double> close_period(std::span<const double> f) {
    std::vector<double> out(f.begin(), f.end());
    out.push_back(f.front());
    return out;
}

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace flamespeed::grid
