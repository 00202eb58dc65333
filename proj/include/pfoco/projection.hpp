#pragma once

#include "pfoco/frank_wolfe.hpp"
#include "pfoco/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>

namespace pfoco {

/// y - (Q / C^2) g. For every z with (y - z)^T g >= Q the result is at least (Q/C)^2
/// closer to z in squared distance.
inline Vector pull_toward(const Vector& y, const Vector& g, double Q, double C) {
    if (y.size() != g.size()) {
        throw InvalidArgument("pull_toward: dimension mismatch");
    }
    require_finite(y, "pull_toward y");
    require_finite(g, "pull_toward g");
    if (!(Q >= 0.0) || !std::isfinite(Q)) {
        throw InvalidArgument("pull_toward: margin Q must be nonnegative and finite");
    }
    if (!(C > 0.0) || !std::isfinite(C)) {
        throw InvalidArgument("pull_toward: norm bound C must be positive and finite");
    }
    const double gnorm = g.norm();
    if (gnorm == 0.0) {
        throw InvalidArgument("pull_toward: zero separator");
    }
    if (gnorm > C * (1.0 + 1e-12)) {
        throw InvalidArgument("pull_toward: separator norm exceeds C");
    }
    return y - (Q / (C * C)) * g;
}

/// Outcome of one infeasible-projection call.
struct CipResult {
    /// Feasible point within squared distance 3 eps of `projection` (LOO variant only).
    Vector anchor;
    Vector projection;
    /// Outer-loop iterations: separating-hyperplane calls for the LOO variant, SO queries for the SO variant.
    std::size_t iterations = 0;
    std::uint64_t loo_calls = 0;
    std::uint64_t so_calls = 0;
    /// Theoretical ceiling on `iterations`; for the SO variant it uses R^2 as the initial
    /// squared distance, tests check the exact distance form separately.
    double iteration_budget = 0.0;
    /// Largest LOO count of a single separating-hyperplane call and its per-call budget.
    std::size_t max_inner_calls = 0;
    std::size_t inner_budget = 0;
    /// Largest ||x_i - y_i|| / ||x_0 - y_0|| seen across outer iterations (LOO variant).
    double max_anchor_ratio = 0.0;

    bool within_budget() const {
        return static_cast<double>(iterations) <= iteration_budget && max_inner_calls <= inner_budget &&
               max_anchor_ratio <= 1.0 + 1e-9;
    }
};

/// max{D (D - eps) / (4 eps^2) + 1, 1} with D = ||x0 - y0||^2.
inline double cip_loo_budget(double initial_gap_sq, double eps) {
    return std::max(initial_gap_sq * (initial_gap_sq - eps) / (4.0 * eps * eps) + 1.0, 1.0);
}

/// (d0 - d1) / (delta^2 (r - delta')^2) + 1 with d0, d1 the squared distances to
/// (1 - delta)(1 - delta'/r) K of the input and the output.
inline double cip_so_budget(double dist_sq_in, double dist_sq_out, double r, double delta, double delta_prime) {
    const double step = delta * (r - delta_prime);
    return (dist_sq_in - dist_sq_out) / (step * step) + 1.0;
}

/// Close infeasible projection of y0 onto K using only the LOO of K.
///
/// Returns x in K and y in R B with ||x - y||^2 <= 3 eps and, for every z in K,
/// ||y - z|| <= ||y0 - z||. The pull step is gamma = 2 eps / ||x0 - y0||^2, fixed for the call.
inline CipResult cip_loo(const FeasibleSet& set, const Vector& x0, const Vector& y0, double eps,
                         OracleCounters& counters) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw InvalidArgument("cip_loo: eps must be positive and finite");
    }
    require_dimension(x0, set.dimension(), "cip_loo x0");
    require_dimension(y0, set.dimension(), "cip_loo y0");
    require_finite(x0, "cip_loo x0");
    require_finite(y0, "cip_loo y0");
    if (!set.contains(x0)) {
        throw InvalidArgument("cip_loo: anchor is not a member of " + set.kind());
    }

    const std::uint64_t loo_before = counters.loo_calls;
    CipResult out;
    Vector y = clip_to_ball(y0, set.outer_radius());
    const double initial_gap_sq = (x0 - y0).squaredNorm();
    out.iteration_budget = cip_loo_budget(initial_gap_sq, eps);
    out.inner_budget = separating_hyperplane_budget(set.outer_radius(), eps);
    if (initial_gap_sq <= 3.0 * eps) {
        out.anchor = x0;
        out.projection = std::move(y);
        return out;
    }

    const double gamma = 2.0 * eps / initial_gap_sq;
    const double initial_gap = std::sqrt(initial_gap_sq);
    const double ceiling = 10.0 * out.iteration_budget;
    Vector x = x0;
    for (;;) {
        if (static_cast<double>(out.iterations) >= ceiling) {
            throw OracleContractError("cip_loo: exceeded 10x the outer iteration budget on " + set.kind());
        }
        const SeparationResult sep = separating_hyperplane_fw(set, x, y, eps, counters);
        ++out.iterations;
        out.max_inner_calls = std::max(out.max_inner_calls, sep.iterations);
        x = sep.point;
        const double gap_sq = (x - y).squaredNorm();
        out.max_anchor_ratio = std::max(out.max_anchor_ratio, std::sqrt(gap_sq) / initial_gap);
        if (gap_sq <= 3.0 * eps) {
            break;
        }
        y -= gamma * (y - x);
    }
    out.anchor = std::move(x);
    out.projection = std::move(y);
    out.loo_calls = counters.loo_calls - loo_before;
    return out;
}

/// Infeasible projection of y0 using only the SO of K, for K containing r B.
///
/// Returns y in (1 - delta'/r) K with ||y - z|| <= ||y0 - z|| for every z in
/// (1 - delta)(1 - delta'/r) K. Each separated query moves y by delta (r - delta')
/// along -g/||g||.
inline CipResult cip_so(const FeasibleSet& set, double r, double delta, double delta_prime, const Vector& y0,
                        OracleCounters& counters) {
    if (!(r > 0.0) || r > set.inner_radius() * (1.0 + 1e-12)) {
        throw InvalidArgument("cip_so: r must be positive and at most the inner radius of " + set.kind());
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InvalidArgument("cip_so: delta must lie in (0, 1)");
    }
    if (!(delta_prime >= 0.0 && delta_prime < r)) {
        throw InvalidArgument("cip_so: delta' must lie in [0, r)");
    }
    require_dimension(y0, set.dimension(), "cip_so y0");
    require_finite(y0, "cip_so y0");

    const std::uint64_t so_before = counters.so_calls;
    const double R = set.outer_radius();
    const double shrink = 1.0 - delta_prime / r;
    const double step = delta * (r - delta_prime);
    CipResult out;
    out.iteration_budget = cip_so_budget(R * R, 0.0, r, delta, delta_prime);
    const double ceiling = 10.0 * out.iteration_budget;
    Vector y = clip_to_ball(y0, R);
    for (;;) {
        if (static_cast<double>(out.iterations) >= ceiling) {
            throw OracleContractError("cip_so: exceeded 10x the iteration budget on " + set.kind());
        }
        const SeparationAnswer answer = so_query(set, y / shrink, counters);
        ++out.iterations;
        if (answer.feasible()) {
            break;
        }
        const Vector& g = *answer.separator;
        const double gnorm = g.norm();
        y = pull_toward(y, g, step * gnorm, gnorm);
    }
    out.projection = std::move(y);
    out.so_calls = counters.so_calls - so_before;
    return out;
}

}  // namespace pfoco
