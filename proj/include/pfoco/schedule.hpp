#pragma once

#include "pfoco/losses.hpp"
#include "pfoco/sampling.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pfoco {

/// Closed interval of rounds [first, last], 1-based.
struct Interval {
    std::size_t first = 1;
    std::size_t last = 1;

    std::size_t length() const { return last - first + 1; }
    bool operator==(const Interval& other) const { return first == other.first && last == other.last; }
    bool operator<(const Interval& other) const {
        return first != other.first ? first < other.first : last < other.last;
    }
};

/// Oblivious loss sequence f_1..f_T, fully materialized before play.
class LossSchedule {
  public:
    /// `radius` is the R over which G_f and M are declared. `segments` lists switch
    /// intervals of switching adversaries (empty otherwise).
    LossSchedule(std::vector<Loss> losses, double radius, std::vector<Interval> segments = {})
        : losses_(std::move(losses)), radius_(radius), segments_(std::move(segments)) {
        if (losses_.empty()) {
            throw InvalidArgument("LossSchedule: empty schedule");
        }
        if (!(radius_ > 0.0)) {
            throw InvalidArgument("LossSchedule: radius must be positive");
        }
        const std::size_t n = losses_.front().dimension();
        alpha_ = losses_.front().alpha();
        for (const Loss& f : losses_) {
            if (f.dimension() != n) {
                throw InvalidArgument("LossSchedule: losses of mixed dimension");
            }
            lipschitz_ = std::max(lipschitz_, f.lipschitz_bound(radius_));
            value_bound_ = std::max(value_bound_, f.value_bound(radius_));
            alpha_ = std::min(alpha_, f.kind() == LossKind::Quadratic ? f.alpha() : 0.0);
        }
        for (const Interval& seg : segments_) {
            if (seg.first < 1 || seg.last < seg.first || seg.last > losses_.size()) {
                throw InvalidArgument("LossSchedule: segment outside the horizon");
            }
        }
    }

    std::size_t horizon() const { return losses_.size(); }
    std::size_t dimension() const { return losses_.front().dimension(); }
    /// Loss of round t, 1-based.
    const Loss& at(std::size_t t) const { return losses_.at(t - 1); }
    const std::vector<Loss>& losses() const { return losses_; }
    const std::vector<Interval>& segments() const { return segments_; }
    bool oblivious() const { return true; }

    double radius() const { return radius_; }
    /// Declared G_f: max Lipschitz constant over rounds on the R-ball.
    double lipschitz() const { return lipschitz_; }
    /// Declared M: max |f_t| over rounds on the R-ball.
    double value_bound() const { return value_bound_; }
    /// Common strong-convexity modulus (0 unless every round is quadratic).
    double strong_convexity() const { return alpha_; }

    bool all_of(LossKind kind) const {
        return std::all_of(losses_.begin(), losses_.end(), [kind](const Loss& f) { return f.kind() == kind; });
    }

  private:
    std::vector<Loss> losses_;
    double radius_;
    std::vector<Interval> segments_;
    double lipschitz_ = 0.0;
    double value_bound_ = 0.0;
    double alpha_ = 0.0;
};

inline void require_horizon(std::size_t T, std::size_t n, const char* what) {
    if (T == 0) {
        throw InvalidArgument(std::string(what) + ": horizon must be positive");
    }
    if (n == 0) {
        throw InvalidArgument(std::string(what) + ": dimension must be positive");
    }
}

inline LossSchedule make_zero_schedule(std::size_t T, std::size_t n, double radius) {
    require_horizon(T, n, "make_zero_schedule");
    return LossSchedule(std::vector<Loss>(T, Loss::linear(Vector::Zero(static_cast<Eigen::Index>(n)))), radius);
}

/// c_t = scale * u_t with u_t i.i.d. uniform on the unit sphere.
inline LossSchedule make_random_linear_schedule(std::size_t T, std::size_t n, double scale, double radius,
                                                std::uint64_t seed) {
    require_horizon(T, n, "make_random_linear_schedule");
    Rng rng(seed);
    std::vector<Loss> losses;
    losses.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
        losses.push_back(Loss::linear(scale * sample_unit_sphere(rng, n)));
    }
    return LossSchedule(std::move(losses), radius);
}

/// 1/2 alpha ||x - b_t||^2 with b_t i.i.d. uniform in the ball of radius center_radius.
inline LossSchedule make_random_quadratic_schedule(std::size_t T, std::size_t n, double alpha, double center_radius,
                                                   double radius, std::uint64_t seed) {
    require_horizon(T, n, "make_random_quadratic_schedule");
    if (!(alpha > 0.0)) {
        throw InvalidArgument("make_random_quadratic_schedule: alpha must be positive");
    }
    Rng rng(seed);
    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(n));
    std::vector<Loss> losses;
    losses.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
        losses.push_back(Loss::quadratic(alpha, center_radius * sample_unit_ball(rng, n), zero));
    }
    return LossSchedule(std::move(losses), radius);
}

struct Segment {
    std::size_t length = 0;
    Vector target;
};

/// Piecewise-stationary adversary whose per-segment minimizer is the segment target.
///
/// linear: c_t = -w_t * target with w_t ~ U[0.5, 1]; on a ball of radius |target| the
/// minimizer is the target. quadratic: 1/2 alpha ||x - target||^2. absdev:
/// |a_t^T (x - target)| with a_t uniform on the sphere.
inline LossSchedule make_switching_schedule(std::size_t T, const std::vector<Segment>& segments, LossKind kind,
                                            std::uint64_t seed, double radius, double alpha = 1.0) {
    if (segments.empty()) {
        throw InvalidArgument("make_switching_schedule: no segments");
    }
    std::size_t total = 0;
    for (const Segment& seg : segments) {
        if (seg.length == 0) {
            throw InvalidArgument("make_switching_schedule: empty segment");
        }
        total += seg.length;
    }
    if (total != T) {
        throw InvalidArgument("make_switching_schedule: segment lengths sum to " + std::to_string(total) +
                              " but T = " + std::to_string(T));
    }
    const std::size_t n = static_cast<std::size_t>(segments.front().target.size());
    require_horizon(T, n, "make_switching_schedule");
    if (kind == LossKind::Quadratic && !(alpha > 0.0)) {
        throw InvalidArgument("make_switching_schedule: quadratic segments need alpha > 0");
    }
    Rng rng(seed);
    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(n));
    std::vector<Loss> losses;
    std::vector<Interval> intervals;
    losses.reserve(T);
    std::size_t start = 1;
    for (const Segment& seg : segments) {
        require_dimension(seg.target, n, "make_switching_schedule target");
        require_finite(seg.target, "make_switching_schedule target");
        for (std::size_t k = 0; k < seg.length; ++k) {
            switch (kind) {
                case LossKind::Linear:
                    losses.push_back(Loss::linear(-sample_uniform(rng, 0.5, 1.0) * seg.target));
                    break;
                case LossKind::Quadratic:
                    losses.push_back(Loss::quadratic(alpha, seg.target, zero));
                    break;
                case LossKind::AbsoluteDeviation: {
                    Vector a = sample_unit_sphere(rng, n);
                    const double b = a.dot(seg.target);
                    losses.push_back(Loss::absolute_deviation(std::move(a), b));
                    break;
                }
            }
        }
        intervals.push_back({start, start + seg.length - 1});
        start += seg.length;
    }
    return LossSchedule(std::move(losses), radius, std::move(intervals));
}

}  // namespace pfoco
