#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "flamespeed/flow_model.hpp"
#include "flamespeed/problem.hpp"

namespace testing_support {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2 * std::numbers::pi;

// Random smooth profile with up to three modes and coefficients in [-amp, amp].
inline flamespeed::FlowSpec random_flow(std::mt19937_64& rng, double amp = 1.0) {
    std::uniform_real_distribution<double> u(-amp, amp);
    flamespeed::FlowSpec f;
    const int K = 1 + int(rng() % 3);
    for (int k = 0; k < K; ++k) {
        f.cosine.push_back(u(rng) / (k + 1));
        f.sine.push_back(u(rng) / (k + 1));
    }
    f.offset = u(rng);
    return f;
}

inline flamespeed::Momentum random_momentum(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> g(0.3, 2.0), s(-1.5, 1.5);
    const double gamma = (rng() % 2 ? 1.0 : -1.0) * g(rng);
    return {gamma, s(rng)};
}

}  // namespace testing_support
