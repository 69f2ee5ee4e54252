/** \file    flow_model.hpp
    \brief   Periodic shear profiles v(y) given as truncated Fourier series.

    A profile is  v(y) = offset + sum_k ( a_k cos 2 pi k y + b_k sin 2 pi k y ),  k = 1..K.
    Derivatives are evaluated by differentiating the series term by term,
    so v' and v'' are exact up to rounding.
*/
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flamespeed {

/// Coefficients of a shear profile. `cosine[k-1]` multiplies cos(2 pi k y).
struct FlowSpec {
    std::vector<double> cosine;
    std::vector<double> sine;
    double offset = 0.0;
    std::optional<std::string> preset_name;

    /// true when every non-constant coefficient vanishes
    bool is_constant() const;

    /// spec of v(y) + c
    FlowSpec shifted(double c) const;
    /// spec of s * v(y)
    FlowSpec scaled(double s) const;
    /// spec of v(-y)
    FlowSpec reflected() const;
};

/// Names accepted by flow_preset().
std::vector<std::string> preset_names();

/** Shipped profiles:
    - "single-well":       cos 2 pi y - 1                      (one maximum at 0, -v'' = 4 pi^2)
    - "two-max-distinct":  -sin^2(2 pi y) (1 + cos(2 pi y)/2)  (maxima at 0 and 1/2, -v'' = 12 pi^2, 4 pi^2)
    - "two-max-tied":      -sin^2(2 pi y)                      (maxima at 0 and 1/2, equal curvature 8 pi^2)
    - "constant":          v = 0
    Throws std::invalid_argument for unknown names. */
FlowSpec flow_preset(const std::string& name);

/// Value and first two derivatives at a point.
struct FlowJet {
    double v, dv, d2v;
};

/** A flow spec together with its summary statistics (mean, max, min).
    Cheap to copy; all evaluators are const and reentrant. */
class FlowProfile {
public:
    FlowProfile() = default;
    explicit FlowProfile(FlowSpec spec);

    double operator()(double y) const { return value(y); }
    double value(double y) const;
    double derivative(double y) const;
    double second_derivative(double y) const;
    FlowJet jet(double y) const;

    const FlowSpec& spec() const { return spec_; }
    double mean() const { return spec_.offset; }
    double max_value() const { return max_value_; }
    double min_value() const { return min_value_; }
    /// location of the maximum found by the scan (one of them if several)
    double argmax() const { return argmax_; }
    bool is_constant() const { return constant_; }
    /// highest wavenumber present
    int max_wavenumber() const;

    /// values at y_j = j/n, j = 0..n-1
    std::vector<double> sample(int n) const;

private:
    FlowSpec spec_;
    double max_value_ = 0, min_value_ = 0, argmax_ = 0;
    bool constant_ = true;
};

/// convenience wrapper matching the operation name used throughout the docs
inline FlowProfile build_flow(FlowSpec spec) { return FlowProfile(std::move(spec)); }

/// One global maximum of v.
struct MaximumPoint {
    double x;               ///< location in [0,1)
    double neg_curvature;   ///< -v''(x)
};

struct MaximaSet {
    std::vector<MaximumPoint> points;   ///< sorted by x
    bool is_finite = true;              ///< false for a constant flow (every point is a maximum)
    bool curvatures_distinct = true;
    bool nondegenerate = true;          ///< every -v''(x_i) is bounded away from 0
    double distinctness_margin = 0;     ///< smallest relative gap between curvatures (inf if one point)
};

struct MaximaTolerances {
    int scan_points = 4096;
    double refine_tol = 1e-12;      ///< Newton step size on v' = 0
    double membership_tol = 1e-10;  ///< |v(x) - max v| below which x counts as a global max
    double distinct_rel_tol = 1e-6; ///< relative gap required between curvatures
    double degenerate_tol = 1e-8;   ///< -v'' below this (relative to max|v''| scale) is degenerate
};

/** All global maxima of a non-constant flow on [0,1).
    Throws std::invalid_argument for a constant flow (the maximum set is not finite). */
MaximaSet locate_maxima(const FlowProfile& flow, const MaximaTolerances& tol = {});

/// Wraps x into [0,1).
double wrap_unit(double x);

}  // namespace flamespeed
