#pragma once

#include "pfoco/core.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace pfoco {

/// Per-run generator. Never shared between runs.
using Rng = std::mt19937_64;

/// Uniform direction on the unit sphere: a normalized standard Gaussian vector.
/// An all-zero draw is discarded and redrawn.
inline Vector sample_unit_sphere(Rng& rng, std::size_t n) {
    if (n == 0) {
        throw InvalidArgument("sample_unit_sphere: dimension must be positive");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector u(static_cast<Eigen::Index>(n));
    for (;;) {
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            u(i) = normal(rng);
        }
        const double norm = u.norm();
        if (norm > 0.0) {
            return u / norm;
        }
    }
}

/// Uniform point in the unit ball: sphere direction times U^(1/n).
inline Vector sample_unit_ball(Rng& rng, std::size_t n) {
    Vector u = sample_unit_sphere(rng, n);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    return std::pow(uniform(rng), 1.0 / static_cast<double>(n)) * u;
}

inline double sample_uniform(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> uniform(lo, hi);
    return uniform(rng);
}

}  // namespace pfoco
