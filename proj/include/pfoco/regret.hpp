#pragma once

#include "pfoco/geometry.hpp"
#include "pfoco/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pfoco {

enum class IntervalPolicy { Geometric, Exhaustive, Single };

inline std::string to_string(IntervalPolicy policy) {
    switch (policy) {
        case IntervalPolicy::Geometric:
            return "geometric";
        case IntervalPolicy::Exhaustive:
            return "exhaustive";
        case IntervalPolicy::Single:
            return "single";
    }
    return "unknown";
}

inline std::optional<IntervalPolicy> interval_policy_from_string(const std::string& name) {
    for (IntervalPolicy p : {IntervalPolicy::Geometric, IntervalPolicy::Exhaustive, IntervalPolicy::Single}) {
        if (to_string(p) == name) {
            return p;
        }
    }
    return std::nullopt;
}

/// Largest horizon the exhaustive policy accepts.
inline constexpr std::size_t kExhaustiveLimit = 256;

/// Interval family scanned for adaptive regret, sorted and without duplicates.
///
/// geometric: lengths ceil(T/2^k) down to 8 (just T when T < 8), starts every
/// max(1, floor(L/4)) rounds plus the end-aligned start, then every schedule segment,
/// every pair of consecutive segments, and the extra intervals.
/// exhaustive: all [s, e]. single: [1, T] plus the extra intervals.
inline std::vector<Interval> make_intervals(IntervalPolicy policy, std::size_t T,
                                            const std::vector<Interval>& segments = {},
                                            const std::vector<Interval>& extra = {}) {
    if (T == 0) {
        throw InvalidArgument("make_intervals: horizon must be positive");
    }
    std::set<Interval> out;
    auto add = [&](const Interval& iv) {
        if (iv.first < 1 || iv.last < iv.first || iv.last > T) {
            throw InvalidArgument("make_intervals: interval [" + std::to_string(iv.first) + ", " +
                                  std::to_string(iv.last) + "] lies outside [1, " + std::to_string(T) + "]");
        }
        out.insert(iv);
    };
    switch (policy) {
        case IntervalPolicy::Single:
            add({1, T});
            break;
        case IntervalPolicy::Exhaustive:
            if (T > kExhaustiveLimit) {
                throw InvalidArgument("make_intervals: exhaustive scan limited to T <= " +
                                      std::to_string(kExhaustiveLimit));
            }
            for (std::size_t s = 1; s <= T; ++s) {
                for (std::size_t e = s; e <= T; ++e) {
                    out.insert({s, e});
                }
            }
            break;
        case IntervalPolicy::Geometric: {
            std::size_t divisor = 1;
            for (;;) {
                const std::size_t L = (T + divisor - 1) / divisor;
                if (L < 8 && divisor > 1) {
                    break;
                }
                const std::size_t stride = std::max<std::size_t>(1, L / 4);
                for (std::size_t s = 1; s + L - 1 <= T; s += stride) {
                    out.insert({s, s + L - 1});
                }
                out.insert({T - L + 1, T});
                if (L <= 1) {
                    break;
                }
                divisor *= 2;
            }
            for (std::size_t i = 0; i < segments.size(); ++i) {
                add(segments[i]);
                if (i + 1 < segments.size()) {
                    add({segments[i].first, segments[i + 1].last});
                }
            }
            break;
        }
    }
    for (const Interval& iv : extra) {
        add(iv);
    }
    return {out.begin(), out.end()};
}

struct IntervalRegret {
    Interval interval;
    Vector comparator;
    double comparator_value = 0.0;
    double played_loss = 0.0;
    double regret = 0.0;
    /// Upper bound on how far comparator_value sits above the interval minimum.
    double certificate_gap = 0.0;
    /// "closed-form" (LOO on the summed linear term) or "dual-gap".
    std::string certificate;
};

struct SkippedInterval {
    Interval interval;
    std::string reason;
};

struct AdaptiveRegretReport {
    std::string policy;
    std::vector<IntervalRegret> intervals;
    std::vector<SkippedInterval> skipped;
    double max_regret = -std::numeric_limits<double>::infinity();
    Interval argmax;
    double comparator_tol = 0.0;

    const IntervalRegret* find(const Interval& iv) const {
        for (const IntervalRegret& r : intervals) {
            if (r.interval == iv) {
                return &r;
            }
        }
        return nullptr;
    }
};

/// Default comparator tolerance 1e-8 G_f R.
inline double default_comparator_tol(double G, double R) {
    const double tol = 1e-8 * G * R;
    return tol > 0.0 ? tol : 1e-12;
}

/// Prefix sums that reduce every interval's summed loss to
/// 1/2 A ||x||^2 - B^T x + C^T x + D, plus the summed played loss.
class RegretEvaluator {
  public:
    RegretEvaluator(const std::vector<double>& played_losses, const LossSchedule& schedule, SetPtr set,
                    double comparator_tol)
        : set_(std::move(set)), tol_(comparator_tol) {
        const std::size_t T = schedule.horizon();
        if (played_losses.size() != T) {
            throw InvalidArgument("regret: trace length " + std::to_string(played_losses.size()) +
                                  " does not match schedule horizon " + std::to_string(T));
        }
        if (schedule.dimension() != set_->dimension()) {
            throw InvalidArgument("regret: schedule and set dimensions differ");
        }
        if (!(tol_ > 0.0)) {
            throw InvalidArgument("regret: comparator tolerance must be positive");
        }
        const auto n = static_cast<Eigen::Index>(schedule.dimension());
        played_.assign(T + 1, 0.0);
        quad_.assign(T + 1, 0.0);
        offset_.assign(T + 1, 0.0);
        nonsmooth_.assign(T + 1, 0);
        lin_ = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(T + 1));
        centre_ = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(T + 1));
        for (std::size_t t = 1; t <= T; ++t) {
            const Loss& f = schedule.at(t);
            const auto col = static_cast<Eigen::Index>(t);
            played_[t] = played_[t - 1] + played_losses[t - 1];
            quad_[t] = quad_[t - 1];
            offset_[t] = offset_[t - 1];
            nonsmooth_[t] = nonsmooth_[t - 1];
            lin_.col(col) = lin_.col(col - 1);
            centre_.col(col) = centre_.col(col - 1);
            switch (f.kind()) {
                case LossKind::Linear:
                    lin_.col(col) += f.linear_term();
                    break;
                case LossKind::Quadratic:
                    lin_.col(col) += f.linear_term();
                    quad_[t] += f.alpha();
                    centre_.col(col) += f.alpha() * f.center();
                    offset_[t] += 0.5 * f.alpha() * f.center().squaredNorm();
                    break;
                case LossKind::AbsoluteDeviation:
                    nonsmooth_[t] += 1;
                    break;
            }
        }
    }

    /// Regret on [first, last] against a certified comparator. Throws ComparatorError when
    /// the interval holds non-smooth losses or the certificate exceeds the tolerance.
    IntervalRegret evaluate(const Interval& iv) const {
        const std::size_t T = played_.size() - 1;
        if (iv.first < 1 || iv.last < iv.first || iv.last > T) {
            throw InvalidArgument("regret: interval outside the horizon");
        }
        const std::size_t s = iv.first - 1;
        const std::size_t e = iv.last;
        if (nonsmooth_[e] != nonsmooth_[s]) {
            throw ComparatorError("interval contains absolute-deviation losses; no certified comparator");
        }
        const auto cs = static_cast<Eigen::Index>(s);
        const auto ce = static_cast<Eigen::Index>(e);
        const Vector C = lin_.col(ce) - lin_.col(cs);
        const double A = quad_[e] - quad_[s];
        const Vector B = centre_.col(ce) - centre_.col(cs);
        const double D = offset_[e] - offset_[s];

        IntervalRegret out;
        out.interval = iv;
        out.played_loss = played_[e] - played_[s];
        if (A <= 0.0) {
            out.comparator = set_->linear_minimizer(C);
            out.comparator_value = C.dot(out.comparator);
            out.certificate = "closed-form";
        } else {
            const Vector target = (B - C) / A;
            out.comparator = exact_project(*set_, target).point;
            const Vector grad = A * out.comparator - B + C;
            const Vector v = set_->linear_minimizer(grad);
            out.certificate_gap = std::max(0.0, grad.dot(out.comparator - v));
            out.comparator_value =
                0.5 * A * out.comparator.squaredNorm() - B.dot(out.comparator) + C.dot(out.comparator) + D;
            out.certificate = "dual-gap";
            if (out.certificate_gap > tol_) {
                throw ComparatorError("comparator dual gap " + std::to_string(out.certificate_gap) +
                                      " exceeds tolerance " + std::to_string(tol_));
            }
        }
        out.regret = out.played_loss - out.comparator_value;
        return out;
    }

  private:
    SetPtr set_;
    double tol_;
    std::vector<double> played_;
    std::vector<double> quad_;
    std::vector<double> offset_;
    std::vector<std::size_t> nonsmooth_;
    Eigen::MatrixXd lin_;
    Eigen::MatrixXd centre_;
};

/// Regret over the whole horizon against a certified fixed comparator.
inline IntervalRegret static_regret(const std::vector<double>& played_losses, const LossSchedule& schedule,
                                    const SetPtr& set, double comparator_tol) {
    RegretEvaluator eval(played_losses, schedule, set, comparator_tol);
    return eval.evaluate({1, schedule.horizon()});
}

/// Maximum interval regret over `intervals`. Intervals whose comparator cannot be
/// certified are listed in `skipped` and left out of the maximum.
inline AdaptiveRegretReport adaptive_regret(const std::vector<double>& played_losses, const LossSchedule& schedule,
                                            const SetPtr& set, const std::vector<Interval>& intervals,
                                            double comparator_tol, const std::string& policy_name = "custom") {
    RegretEvaluator eval(played_losses, schedule, set, comparator_tol);
    AdaptiveRegretReport report;
    report.policy = policy_name;
    report.comparator_tol = comparator_tol;
    report.intervals.reserve(intervals.size());
    for (const Interval& iv : intervals) {
        try {
            IntervalRegret r = eval.evaluate(iv);
            if (r.regret > report.max_regret) {
                report.max_regret = r.regret;
                report.argmax = iv;
            }
            report.intervals.push_back(std::move(r));
        } catch (const ComparatorError& err) {
            report.skipped.push_back({iv, err.what()});
        }
    }
    return report;
}

}  // namespace pfoco
