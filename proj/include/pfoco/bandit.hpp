#pragma once

#include "pfoco/losses.hpp"
#include "pfoco/sampling.hpp"

#include <cmath>
#include <cstddef>

namespace pfoco {

/// One-point estimator (n / delta) f(x + delta u) u of the gradient of the delta-smoothed loss.
inline Vector bandit_gradient_estimate(double fvalue, const Vector& u, std::size_t n, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw InvalidArgument("bandit_gradient_estimate: delta must be positive and finite");
    }
    if (!std::isfinite(fvalue)) {
        throw InvalidArgument("bandit_gradient_estimate: non-finite loss value");
    }
    require_dimension(u, n, "bandit_gradient_estimate");
    if (std::abs(u.norm() - 1.0) > 1e-12) {
        throw InvalidArgument("bandit_gradient_estimate: direction is not a unit vector");
    }
    return (static_cast<double>(n) / delta * fvalue) * u;
}

struct MonteCarloEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

/// Monte-Carlo estimate of E_{u ~ unit ball} f(x + delta u). Test oracle only.
inline MonteCarloEstimate smoothed_value_mc(const Loss& loss, const Vector& x, double delta, std::size_t samples,
                                            Rng& rng) {
    if (samples < 2) {
        throw InvalidArgument("smoothed_value_mc: need at least two samples");
    }
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw InvalidArgument("smoothed_value_mc: delta must be nonnegative and finite");
    }
    const std::size_t n = loss.dimension();
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double value = loss.value(x + delta * sample_unit_ball(rng, n));
        const double step = value - mean;
        mean += step / static_cast<double>(k + 1);
        m2 += step * (value - mean);
    }
    const double variance = m2 / static_cast<double>(samples - 1);
    return {mean, std::sqrt(variance / static_cast<double>(samples))};
}

}  // namespace pfoco
