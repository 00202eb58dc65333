#pragma once

#include "pfoco/core.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace pfoco {

/// Membership slack, relative to the set's outer radius.
inline constexpr double kMembershipTol = 1e-12;

/// Per-run oracle accounting. Owned by a single run loop; never shared between runs.
struct OracleCounters {
    std::uint64_t loo_calls = 0;
    std::uint64_t so_calls = 0;
};

/// Answer of a separation oracle: either the point is feasible, or `separator` is a
/// nonzero g with (point - z)^T g > 0 for every z in the set.
struct SeparationAnswer {
    std::optional<Vector> separator;

    bool feasible() const { return !separator.has_value(); }
    static SeparationAnswer inside() { return {}; }
    static SeparationAnswer separating(Vector g) { return {std::move(g)}; }
};

struct ProjectionResult {
    Vector point;
    /// Frank-Wolfe dual gap of 1/2||x - y||^2 at `point`; 0 for closed-form projections.
    double certificate_gap = 0.0;
    bool exact = true;
};

/// A convex compact set K with K contained in R*B. Implementations are immutable and
/// safe to share across concurrent runs; the raw oracle methods below do no accounting,
/// callers go through loo_query / so_query.
class FeasibleSet {
  public:
    virtual ~FeasibleSet() = default;

    virtual std::string kind() const = 0;
    virtual std::size_t dimension() const = 0;
    /// R with K inside the origin-centred ball of radius R.
    virtual double outer_radius() const = 0;
    /// r with the origin-centred ball of radius r inside K; 0 when no such ball is claimed.
    virtual double inner_radius() const = 0;

    /// argmin over K of direction^T x. Ties resolve to the lowest coordinate index.
    virtual Vector linear_minimizer(const Vector& direction) const = 0;
    /// Largest constraint violation at `point` in Euclidean-distance units, 0 if inside.
    virtual double violation(const Vector& point) const = 0;
    /// Separator for a point outside K; only called when violation exceeds tolerance.
    virtual Vector separator(const Vector& point) const = 0;
    /// Euclidean projection. Test and baseline oracle only; never counted in budgets.
    virtual ProjectionResult project(const Vector& point) const = 0;
    /// Some member of K used to seed learners. The origin unless overridden.
    virtual Vector reference_point() const { return Vector::Zero(static_cast<Eigen::Index>(dimension())); }

    bool contains(const Vector& point, double rel_tol = kMembershipTol) const {
        return violation(point) <= rel_tol * outer_radius();
    }
};

using SetPtr = std::shared_ptr<const FeasibleSet>;

/// Counted linear optimization oracle query.
inline Vector loo_query(const FeasibleSet& set, const Vector& direction, OracleCounters& counters) {
    require_dimension(direction, set.dimension(), "loo_query");
    require_finite(direction, "loo_query");
    ++counters.loo_calls;
    return set.linear_minimizer(direction);
}

/// Counted separation oracle query.
inline SeparationAnswer so_query(const FeasibleSet& set, const Vector& point, OracleCounters& counters) {
    require_dimension(point, set.dimension(), "so_query");
    require_finite(point, "so_query");
    ++counters.so_calls;
    if (set.contains(point)) {
        return SeparationAnswer::inside();
    }
    Vector g = set.separator(point);
    if (g.squaredNorm() == 0.0 || !g.allFinite()) {
        throw OracleContractError(set.kind() + ": separation oracle returned a degenerate separator");
    }
    return SeparationAnswer::separating(std::move(g));
}

inline ProjectionResult exact_project(const FeasibleSet& set, const Vector& point) {
    require_dimension(point, set.dimension(), "exact_project");
    require_finite(point, "exact_project");
    return set.project(point);
}

/// The scaled copy factor * K. Nested squeezes collapse into a single view over the
/// original base with the product factor.
class SqueezedSet final : public FeasibleSet {
  public:
    SqueezedSet(SetPtr base, double factor) : base_(std::move(base)), factor_(factor) {
        if (!base_) {
            throw InvalidArgument("squeeze: null base set");
        }
        if (!(factor_ > 0.0 && factor_ <= 1.0)) {
            throw InvalidArgument("squeeze: factor must lie in (0, 1], got " + std::to_string(factor_));
        }
    }

    const FeasibleSet& base() const { return *base_; }
    const SetPtr& base_ptr() const { return base_; }
    double factor() const { return factor_; }

    std::string kind() const override { return "squeezed(" + base_->kind() + ")"; }
    std::size_t dimension() const override { return base_->dimension(); }
    double outer_radius() const override { return factor_ * base_->outer_radius(); }
    double inner_radius() const override { return factor_ * base_->inner_radius(); }

    Vector linear_minimizer(const Vector& direction) const override {
        return factor_ * base_->linear_minimizer(direction);
    }
    double violation(const Vector& point) const override {
        return factor_ * base_->violation(point / factor_);
    }
    // (x/l - z)^T g > 0 for all z in K  <=>  (x - l z)^T g > 0 for all l z in lK.
    Vector separator(const Vector& point) const override { return base_->separator(point / factor_); }
    ProjectionResult project(const Vector& point) const override {
        ProjectionResult res = base_->project(point / factor_);
        res.point *= factor_;
        res.certificate_gap *= factor_ * factor_;
        return res;
    }
    Vector reference_point() const override { return factor_ * base_->reference_point(); }

  private:
    SetPtr base_;
    double factor_;
};

inline std::shared_ptr<const SqueezedSet> squeeze(const SetPtr& set, double factor) {
    if (!(factor > 0.0 && factor <= 1.0)) {
        throw InvalidArgument("squeeze: factor must lie in (0, 1], got " + std::to_string(factor));
    }
    if (const auto* inner = dynamic_cast<const SqueezedSet*>(set.get())) {
        return std::make_shared<const SqueezedSet>(inner->base_ptr(), inner->factor() * factor);
    }
    return std::make_shared<const SqueezedSet>(set, factor);
}

}  // namespace pfoco
