#pragma once

#include "pfoco/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>

namespace pfoco {

/// argmin over sigma in [0,1] of ||x + sigma (v - x) - y||^2. Returns 0 when v == x.
inline double exact_line_search_quadratic(const Vector& x, const Vector& v, const Vector& y) {
    if (x.size() != v.size() || x.size() != y.size()) {
        throw InvalidArgument("exact_line_search_quadratic: dimension mismatch");
    }
    const Vector dir = v - x;
    const double denom = dir.squaredNorm();
    if (denom == 0.0) {
        return 0.0;
    }
    return std::clamp((y - x).dot(dir) / denom, 0.0, 1.0);
}

struct FwStop {
    double gap_tol = 1e-8;
    std::size_t max_iters = 10000;
};

/// Frank-Wolfe state at iterate x_i (x_0 is the start point).
struct FwState {
    Vector x;
    /// Number of line-search updates applied to reach x.
    std::size_t iteration = 0;
    /// LOO answer at x, i.e. argmin over K of (x - y)^T v.
    Vector vertex;
    /// Step taken out of x; 0 for the returned state.
    double step = 0.0;
    /// (x - y)^T (x - vertex), an upper bound on f(x) - min f.
    double gap = 0.0;
    bool converged = false;
};

/// Called once per iterate, after its LOO answer and gap are known and before the update.
using FwObserver = std::function<void(const FwState&)>;

/// Frank-Wolfe with exact line search on f(x) = 1/2 ||x - y||^2 over `set`.
///
/// Stops at the first iterate whose dual gap is at most stop.gap_tol, or after
/// stop.max_iters LOO calls with `converged` false.
inline FwState frank_wolfe_min_distance(const FeasibleSet& set, const Vector& x0, const Vector& y, const FwStop& stop,
                                        OracleCounters& counters, const FwObserver& observer = {}) {
    require_dimension(x0, set.dimension(), "frank_wolfe_min_distance x0");
    require_dimension(y, set.dimension(), "frank_wolfe_min_distance y");
    require_finite(x0, "frank_wolfe_min_distance x0");
    require_finite(y, "frank_wolfe_min_distance y");
    if (!set.contains(x0)) {
        throw InvalidArgument("frank_wolfe_min_distance: start point is not a member of " + set.kind());
    }
    if (stop.max_iters == 0) {
        throw InvalidArgument("frank_wolfe_min_distance: max_iters must be positive");
    }

    FwState state;
    state.x = x0;
    for (std::size_t calls = 1;; ++calls) {
        const Vector grad = state.x - y;
        state.vertex = loo_query(set, grad, counters);
        state.gap = grad.dot(state.x - state.vertex);
        state.step = 0.0;
        state.converged = state.gap <= stop.gap_tol;
        if (state.converged || calls == stop.max_iters) {
            if (observer) {
                observer(state);
            }
            return state;
        }
        state.step = exact_line_search_quadratic(state.x, state.vertex, y);
        if (observer) {
            observer(state);
        }
        state.x += state.step * (state.vertex - state.x);
        ++state.iteration;
    }
}

enum class SeparationVerdict { Close, Separated };

struct SeparationResult {
    /// Member of K no farther from y than the start point.
    Vector point;
    SeparationVerdict verdict = SeparationVerdict::Close;
    /// LOO calls made (one per iteration).
    std::size_t iterations = 0;
    /// Dual gap at `point`.
    double gap = 0.0;
};

/// Iteration budget ceil(27 R^2 / eps - 2), floored at 1.
inline std::size_t separating_hyperplane_budget(double outer_radius, double eps) {
    const double raw = std::ceil(27.0 * outer_radius * outer_radius / eps - 2.0);
    return raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
}

/// Frank-Wolfe on 1/2||x - y||^2 from x1 until either the dual gap drops to eps or
/// the iterate is within squared distance 3 eps of y.
///
/// A Separated verdict means (y - z)^T (y - point) > 2 eps for every z in K.
/// Throws OracleContractError if the loop outlives ten times its iteration budget.
inline SeparationResult separating_hyperplane_fw(const FeasibleSet& set, const Vector& x1, const Vector& y, double eps,
                                                 OracleCounters& counters) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw InvalidArgument("separating_hyperplane_fw: eps must be positive and finite");
    }
    require_dimension(x1, set.dimension(), "separating_hyperplane_fw x1");
    require_dimension(y, set.dimension(), "separating_hyperplane_fw y");
    require_finite(x1, "separating_hyperplane_fw x1");
    require_finite(y, "separating_hyperplane_fw y");
    if (!set.contains(x1)) {
        throw InvalidArgument("separating_hyperplane_fw: start point is not a member of " + set.kind());
    }

    const std::size_t ceiling = 10 * separating_hyperplane_budget(set.outer_radius(), eps);
    Vector x = x1;
    for (std::size_t i = 1;; ++i) {
        if (i > ceiling) {
            throw OracleContractError("separating_hyperplane_fw: exceeded 10x the iteration budget on " + set.kind());
        }
        const Vector grad = x - y;
        const Vector v = loo_query(set, grad, counters);
        const double gap = grad.dot(x - v);
        if (gap <= eps) {
            const bool close = grad.squaredNorm() <= 3.0 * eps;
            return {std::move(x), close ? SeparationVerdict::Close : SeparationVerdict::Separated, i, gap};
        }
        if (grad.squaredNorm() <= 3.0 * eps) {
            return {std::move(x), SeparationVerdict::Close, i, gap};
        }
        const double sigma = exact_line_search_quadratic(x, v, y);
        x += sigma * (v - x);
    }
}

}  // namespace pfoco
