#include "flamespeed/flow_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include <boost/math/tools/roots.hpp>

namespace flamespeed {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

/// Newton on v' = 0 inside [lo, hi], falling back to the bracket midpoint logic of boost.
double refine_critical_point(const FlowProfile& flow, double guess, double lo, double hi) {
    const double dlo = flow.derivative(lo), dhi = flow.derivative(hi);
    if (dlo * dhi > 0)
        return guess;  // no sign change: keep the scan point
    std::uintmax_t iters = 100;
    auto fn = [&](double x) {
        const FlowJet j = flow.jet(x);
        return std::make_tuple(j.dv, j.d2v);
    };
    return boost::math::tools::newton_raphson_iterate(fn, guess, lo, hi, 50, iters);
}

}  // namespace

bool FlowSpec::is_constant() const {
    auto nz = [](double c) { return c != 0.0; };
    return std::none_of(cosine.begin(), cosine.end(), nz) &&
           std::none_of(sine.begin(), sine.end(), nz);
}

FlowSpec FlowSpec::shifted(double c) const {
    FlowSpec s = *this;
    s.offset += c;
    s.preset_name.reset();
    return s;
}

FlowSpec FlowSpec::scaled(double f) const {
    FlowSpec s = *this;
    for (double& a : s.cosine) a *= f;
    for (double& b : s.sine) b *= f;
    s.offset *= f;
    s.preset_name.reset();
    return s;
}

FlowSpec FlowSpec::reflected() const {
    FlowSpec s = *this;
    for (double& b : s.sine) b = -b;
    s.preset_name.reset();
    return s;
}

std::vector<std::string> preset_names() {
    return {"single-well", "two-max-distinct", "two-max-tied", "constant"};
}

FlowSpec flow_preset(const std::string& name) {
    FlowSpec s;
    if (name == "single-well") {
        s.cosine = {1.0};
        s.offset = -1.0;
    } else if (name == "two-max-distinct") {
        // -sin^2(2 pi y)(1 + cos(2 pi y)/2) expanded in cosines
        s.cosine = {-0.125, 0.5, 0.125};
        s.offset = -0.5;
    } else if (name == "two-max-tied") {
        // -sin^2(2 pi y) = -1/2 + cos(4 pi y)/2
        s.cosine = {0.0, 0.5};
        s.offset = -0.5;
    } else if (name == "constant") {
        // all zero
    } else {
        throw std::invalid_argument("unknown flow preset '" + name + "'");
    }
    s.preset_name = name;
    return s;
}

FlowProfile::FlowProfile(FlowSpec spec) : spec_(std::move(spec)) {
    for (double c : spec_.cosine)
        if (!std::isfinite(c)) throw std::invalid_argument("flow coefficient is not finite");
    for (double c : spec_.sine)
        if (!std::isfinite(c)) throw std::invalid_argument("flow coefficient is not finite");
    if (!std::isfinite(spec_.offset)) throw std::invalid_argument("flow offset is not finite");

    constant_ = spec_.is_constant();
    if (constant_) {
        max_value_ = min_value_ = spec_.offset;
        argmax_ = 0;
        return;
    }

    // dense scan, then refine every discrete local extremum
    const int n = 4096;
    const double h = 1.0 / n;
    const std::vector<double> vals = sample(n);
    max_value_ = -std::numeric_limits<double>::infinity();
    min_value_ = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const double prev = vals[(j + n - 1) % n], next = vals[(j + 1) % n];
        const double x = j * h;
        if (vals[j] >= prev && vals[j] >= next) {
            const double xr = refine_critical_point(*this, x, x - h, x + h);
            const double vr = std::max(value(xr), vals[j]);
            if (vr > max_value_) {
                max_value_ = vr;
                argmax_ = wrap_unit(vr == vals[j] ? x : xr);
            }
        }
        if (vals[j] <= prev && vals[j] <= next) {
            const double xr = refine_critical_point(*this, x, x - h, x + h);
            min_value_ = std::min({min_value_, value(xr), vals[j]});
        }
    }
}

double FlowProfile::value(double y) const {
    double s = spec_.offset;
    for (std::size_t k = 0; k < spec_.cosine.size(); ++k)
        s += spec_.cosine[k] * std::cos(kTwoPi * double(k + 1) * y);
    for (std::size_t k = 0; k < spec_.sine.size(); ++k)
        s += spec_.sine[k] * std::sin(kTwoPi * double(k + 1) * y);
    return s;
}

double FlowProfile::derivative(double y) const { return jet(y).dv; }

double FlowProfile::second_derivative(double y) const { return jet(y).d2v; }

FlowJet FlowProfile::jet(double y) const {
    FlowJet j{spec_.offset, 0.0, 0.0};
    const std::size_t kmax = std::max(spec_.cosine.size(), spec_.sine.size());
    for (std::size_t k = 0; k < kmax; ++k) {
        const double w = kTwoPi * double(k + 1);
        const double c = std::cos(w * y), s = std::sin(w * y);
        const double a = k < spec_.cosine.size() ? spec_.cosine[k] : 0.0;
        const double b = k < spec_.sine.size() ? spec_.sine[k] : 0.0;
        j.v += a * c + b * s;
        j.dv += w * (-a * s + b * c);
        j.d2v -= w * w * (a * c + b * s);
    }
    return j;
}

int FlowProfile::max_wavenumber() const {
    int k = 0;
    for (std::size_t i = 0; i < spec_.cosine.size(); ++i)
        if (spec_.cosine[i] != 0.0) k = std::max(k, int(i + 1));
    for (std::size_t i = 0; i < spec_.sine.size(); ++i)
        if (spec_.sine[i] != 0.0) k = std::max(k, int(i + 1));
    return k;
}

std::vector<double> FlowProfile::sample(int n) const {
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) out[j] = value(double(j) / n);
    return out;
}

double wrap_unit(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0;
    return r;
}

MaximaSet locate_maxima(const FlowProfile& flow, const MaximaTolerances& tol) {
    if (flow.is_constant())
        throw std::invalid_argument("locate_maxima: constant flow has no finite maximum set");

    const int n = tol.scan_points;
    const double h = 1.0 / n;
    const std::vector<double> vals = flow.sample(n);
    const double vmax = flow.max_value();

    // curvature scale used for the degeneracy test
    double curv_scale = 0;
    {
        const int kmax = flow.max_wavenumber();
        const double w = kTwoPi * kmax;
        double amp = 0;
        for (double a : flow.spec().cosine) amp += std::abs(a);
        for (double b : flow.spec().sine) amp += std::abs(b);
        curv_scale = w * w * amp;
    }

    MaximaSet out;
    for (int j = 0; j < n; ++j) {
        const double prev = vals[(j + n - 1) % n], next = vals[(j + 1) % n];
        // strict on one side so a flat pair of samples yields one candidate
        if (!(vals[j] >= prev && vals[j] > next)) continue;
        const double x = j * h;
        double xr = refine_critical_point(flow, x, x - h, x + h);
        // second pass tightens a Newton result that stopped on the digits criterion
        const FlowJet jr = flow.jet(xr);
        if (jr.d2v < 0 && std::abs(jr.dv / jr.d2v) > tol.refine_tol) xr -= jr.dv / jr.d2v;
        if (std::abs(flow.value(xr) - vmax) >= tol.membership_tol) continue;
        xr = wrap_unit(xr);
        const bool dup = std::any_of(out.points.begin(), out.points.end(), [&](const MaximumPoint& p) {
            const double dx = std::abs(p.x - xr);
            return std::min(dx, 1.0 - dx) < 2 * h;
        });
        if (dup) continue;
        out.points.push_back({xr, -flow.second_derivative(xr)});
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const MaximumPoint& a, const MaximumPoint& b) { return a.x < b.x; });

    out.distinctness_margin = std::numeric_limits<double>::infinity();
    for (const auto& p : out.points)
        if (p.neg_curvature <= tol.degenerate_tol * curv_scale) out.nondegenerate = false;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        for (std::size_t k = i + 1; k < out.points.size(); ++k) {
            const double a = out.points[i].neg_curvature, b = out.points[k].neg_curvature;
            const double rel = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
            out.distinctness_margin = std::min(out.distinctness_margin, rel);
        }
    }
    out.curvatures_distinct = out.distinctness_margin > tol.distinct_rel_tol;
    return out;
}

}  // namespace flamespeed
