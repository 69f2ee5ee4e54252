#include "flamespeed/problem.hpp"

#include <stdexcept>

namespace flamespeed {

std::vector<double> NormalizedProblem::to_original_frame(const std::vector<double>& samples) const {
    if (!reflected) return samples;
    const std::size_t n = samples.size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = samples[(n - j) % n];
    return out;
}

double NormalizedProblem::x_to_original(double x) const { return reflected ? wrap_unit(-x) : wrap_unit(x); }

NormalizedProblem normalize(const FlowProfile& flow, Momentum p) {
    if (!std::isfinite(p.gamma) || !std::isfinite(p.mu))
        throw std::invalid_argument("normalize: momentum is not finite");
    if (p.gamma == 0.0)
        throw std::invalid_argument("normalize: gamma = 0 has the closed form H = |mu|");

    NormalizedProblem np;
    np.original = p;
    np.original_flow = flow;

    FlowSpec spec = flow.spec();
    if (p.gamma < 0) {
        spec = spec.scaled(-1.0);
        np.gamma_flipped = true;
    }
    if (p.mu < 0) {
        spec = spec.reflected();
        np.reflected = true;
    }
    np.gamma = std::abs(p.gamma);
    np.mu = std::abs(p.mu);

    const FlowProfile signed_flow(spec);
    np.c_shift = signed_flow.max_value();
    FlowSpec eff = spec.shifted(-np.c_shift);
    if (!np.gamma_flipped && !np.reflected) eff.preset_name = flow.spec().preset_name;
    np.flow = FlowProfile(std::move(eff));
    return np;
}

}  // namespace flamespeed
