#pragma once

#include "pfoco/bandit.hpp"
#include "pfoco/geometry.hpp"
#include "pfoco/projection.hpp"
#include "pfoco/schedule.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pfoco {

enum class LearnerKind { LooBogd, LooBogdStronglyConvex, LooBbgd, SoOgd, SoBgd, ExactOgd };

inline std::string to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::LooBogd:
            return "loo_bogd";
        case LearnerKind::LooBogdStronglyConvex:
            return "loo_bogd_sc";
        case LearnerKind::LooBbgd:
            return "loo_bbgd";
        case LearnerKind::SoOgd:
            return "so_ogd";
        case LearnerKind::SoBgd:
            return "so_bgd";
        case LearnerKind::ExactOgd:
            return "exact_ogd_baseline";
    }
    return "unknown";
}

inline std::optional<LearnerKind> learner_from_string(const std::string& name) {
    for (LearnerKind k : {LearnerKind::LooBogd, LearnerKind::LooBogdStronglyConvex, LearnerKind::LooBbgd,
                          LearnerKind::SoOgd, LearnerKind::SoBgd, LearnerKind::ExactOgd}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

inline bool is_bandit(LearnerKind kind) { return kind == LearnerKind::LooBbgd || kind == LearnerKind::SoBgd; }

/// Problem constants the parameter formulas read: dimension n, radii R and r, and the
/// declared loss bounds G_f, M, alpha.
struct ProblemConstants {
    std::size_t n = 0;
    double R = 0.0;
    double r = 0.0;
    double G = 0.0;
    double M = 0.0;
    double alpha = 0.0;
};

inline ProblemConstants problem_constants(const FeasibleSet& set, const LossSchedule& schedule) {
    return {set.dimension(), set.outer_radius(), set.inner_radius(), schedule.lipschitz(), schedule.value_bound(),
            schedule.strong_convexity()};
}

/// Raised when parameters violate a precondition of the learner's guarantee. The
/// message names the violated inequality.
class PreconditionError : public InvalidArgument {
  public:
    using InvalidArgument::InvalidArgument;
};

struct LearnerParams {
    LearnerKind kind = LearnerKind::LooBogd;
    std::size_t T = 0;
    std::size_t n = 0;
    /// Rounds per block; 1 for the per-round learners.
    std::size_t K = 1;
    /// ceil(T / K); the last block may be short.
    std::size_t blocks = 0;
    /// floor(T / K).
    std::size_t full_blocks = 0;
    /// Step size per block (index m - 1), or a single constant entry.
    std::vector<double> eta;
    /// Projection tolerance per block (index m - 1), or a single constant entry.
    std::vector<double> eps;
    double delta = 0.0;
    double delta_prime = 0.0;
    double c = 0.0;
    double c_prime = 0.0;
    double alpha = 0.0;
    double R = 0.0;
    double r = 0.0;
    double G = 0.0;
    double M = 0.0;

    /// Step size of block m (1-based).
    double step(std::size_t m) const { return eta.size() == 1 ? eta.front() : eta.at(m - 1); }
    /// Projection tolerance of block m (1-based).
    double tolerance(std::size_t m) const { return eps.size() == 1 ? eps.front() : eps.at(m - 1); }
};

/// ceil(value) clamped to [1, T]. Values within relative 1e-12 of an integer round to it.
inline std::size_t integer_block_size(double value, std::size_t T) {
    const double nearest = std::round(value);
    const double snapped = std::abs(value - nearest) <= 1e-12 * std::max(1.0, std::abs(value)) ? nearest : value;
    const double up = std::ceil(snapped);
    if (!(up >= 1.0)) {
        return 1;
    }
    if (up >= static_cast<double>(T)) {
        return T;
    }
    return static_cast<std::size_t>(up);
}

namespace detail {

inline void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidArgument(std::string(what) + " must be positive and finite");
    }
}

inline void require_horizon(std::size_t T) {
    if (T == 0) {
        throw InvalidArgument("horizon T must be at least 1");
    }
}

/// Losses that are identically zero declare G_f = 0 or M = 0; the step-size formulas
/// then use 1 in their place.
inline double nonzero_or_one(double v) { return v > 0.0 ? v : 1.0; }

inline void set_blocks(LearnerParams& p, std::size_t K) {
    p.K = K;
    p.blocks = (p.T + K - 1) / K;
    p.full_blocks = p.T / K;
}

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

/// eta = (R/G_f) T^{-3/4}, eps = 60 R^2 T^{-1/2}, K = ceil(5 sqrt(T)).
inline LearnerParams loo_bogd_params(double R, double G, std::size_t T) {
    detail::require_positive(R, "R");
    detail::require_horizon(T);
    if (!(G >= 0.0) || !std::isfinite(G)) {
        throw InvalidArgument("G_f must be nonnegative and finite");
    }
    const double t = static_cast<double>(T);
    LearnerParams p;
    p.kind = LearnerKind::LooBogd;
    p.T = T;
    p.R = R;
    p.G = G;
    p.eta = {R / detail::nonzero_or_one(G) * std::pow(t, -0.75)};
    p.eps = {60.0 * R * R / std::sqrt(t)};
    detail::set_blocks(p, integer_block_size(5.0 * std::sqrt(t), T));
    return p;
}

/// eps_m = (20 G_f / (alpha (m + 3)))^2, eta_m = 2 / (alpha K m), K = ceil((alpha R / G_f)^{2/3} T^{2/3}).
/// Requires T >= 27 (alpha R / G_f)^2.
inline LearnerParams sc_params(double R, double G, double alpha, std::size_t T) {
    detail::require_positive(R, "R");
    detail::require_positive(G, "G_f");
    detail::require_horizon(T);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw PreconditionError("strongly convex learner needs alpha > 0 (losses must be alpha-strongly convex)");
    }
    const double t = static_cast<double>(T);
    const double ratio = alpha * R / G;
    if (t < 27.0 * ratio * ratio) {
        throw PreconditionError("T >= 27(alpha R/G_f)^2 violated: T = " + std::to_string(T) +
                                ", 27(alpha R/G_f)^2 = " + detail::fmt(27.0 * ratio * ratio));
    }
    LearnerParams p;
    p.kind = LearnerKind::LooBogdStronglyConvex;
    p.T = T;
    p.R = R;
    p.G = G;
    p.alpha = alpha;
    detail::set_blocks(p, integer_block_size(std::pow(ratio, 2.0 / 3.0) * std::pow(t, 2.0 / 3.0), T));
    for (std::size_t m = 1; m <= p.blocks; ++m) {
        const double md = static_cast<double>(m);
        const double root = 20.0 * G / (alpha * (md + 3.0));
        p.eps.push_back(root * root);
        p.eta.push_back(2.0 / (alpha * static_cast<double>(p.K) * md));
    }
    return p;
}

/// eta = (R / sqrt(nM)) T^{-3/4}, K = ceil(6 n M sqrt(T)), delta = c T^{-1/4} with
/// c T^{-1/4} / r < 1. Without c, uses c = 20 R sqrt(nM) when (20 R sqrt(nM) / r)^4 <= T.
inline LearnerParams loo_bbgd_params(const ProblemConstants& pc, std::size_t T, std::optional<double> c = {}) {
    detail::require_horizon(T);
    detail::require_positive(pc.R, "R");
    if (!(pc.r > 0.0)) {
        throw PreconditionError("bandit learner needs an inner ball: r > 0");
    }
    const double t = static_cast<double>(T);
    const double n = static_cast<double>(pc.n);
    const double nM = n * detail::nonzero_or_one(pc.M);
    if (!c) {
        const double suggested = 20.0 * pc.R * std::sqrt(nM);
        const double lhs = std::pow(suggested / pc.r, 4.0);
        if (lhs > t) {
            throw PreconditionError("no admissible default for c: (20R sqrt(nM)/r)^4 <= T fails (" + detail::fmt(lhs) +
                                    " > " + std::to_string(T) + "); supply constants.c with c T^{-1/4}/r < 1");
        }
        c = suggested;
    }
    detail::require_positive(*c, "c");
    const double delta = *c * std::pow(t, -0.25);
    if (!(delta / pc.r < 1.0)) {
        throw PreconditionError("c T^{-1/4}/r < 1 violated: c T^{-1/4}/r = " + detail::fmt(delta / pc.r));
    }
    LearnerParams p;
    p.kind = LearnerKind::LooBbgd;
    p.T = T;
    p.n = pc.n;
    p.R = pc.R;
    p.r = pc.r;
    p.G = pc.G;
    p.M = pc.M;
    p.c = *c;
    p.delta = delta;
    p.eta = {pc.R / std::sqrt(nM) * std::pow(t, -0.75)};
    p.eps = {delta * delta / 3.0};
    detail::set_blocks(p, integer_block_size(6.0 * nM * std::sqrt(t), T));
    return p;
}

/// delta = c T^{-1/2} in (0, 1), eta = (r / (2 G_f)) T^{-1/2}. Without c, uses
/// c = 4R/r when 4R/r <= sqrt(T).
inline LearnerParams so_ogd_params(const ProblemConstants& pc, std::size_t T, std::optional<double> c = {}) {
    detail::require_horizon(T);
    detail::require_positive(pc.R, "R");
    if (!(pc.r > 0.0)) {
        throw PreconditionError("separation-oracle learner needs an inner ball: r > 0");
    }
    const double t = static_cast<double>(T);
    if (!c) {
        const double suggested = 4.0 * pc.R / pc.r;
        if (suggested > std::sqrt(t)) {
            throw PreconditionError("no admissible default for c: 4R/r <= sqrt(T) fails; supply constants.c with "
                                    "0 < c T^{-1/2} < 1");
        }
        c = suggested;
    }
    detail::require_positive(*c, "c");
    const double delta = *c / std::sqrt(t);
    if (!(delta < 1.0)) {
        throw PreconditionError("c T^{-1/2} < 1 violated: c T^{-1/2} = " + detail::fmt(delta));
    }
    LearnerParams p;
    p.kind = LearnerKind::SoOgd;
    p.T = T;
    p.n = pc.n;
    p.R = pc.R;
    p.r = pc.r;
    p.G = pc.G;
    p.M = pc.M;
    p.c = *c;
    p.delta = delta;
    p.eta = {pc.r / (2.0 * detail::nonzero_or_one(pc.G)) / std::sqrt(t)};
    detail::set_blocks(p, 1);
    return p;
}

/// eta = (r / (4 sqrt(nM))) T^{-3/4}, delta = c T^{-1/4}, delta' = c' T^{-1/4}, with
/// 2 c' T^{-1/4} < r and c T^{-1/4} < 1. Without constants, uses c = 8/r, c' = sqrt(nM)
/// when T^{1/4} > max{2 sqrt(nM)/r, 8/r}.
inline LearnerParams so_bgd_params(const ProblemConstants& pc, std::size_t T, std::optional<double> c = {},
                                   std::optional<double> c_prime = {}) {
    detail::require_horizon(T);
    detail::require_positive(pc.R, "R");
    if (!(pc.r > 0.0)) {
        throw PreconditionError("bandit learner needs an inner ball: r > 0");
    }
    const double t = static_cast<double>(T);
    const double quarter = std::pow(t, 0.25);
    const double nM = static_cast<double>(pc.n) * detail::nonzero_or_one(pc.M);
    if (!c || !c_prime) {
        const double need = std::max(2.0 * std::sqrt(nM) / pc.r, 8.0 / pc.r);
        if (!(quarter > need)) {
            throw PreconditionError("no admissible default constants: T^{1/4} > max{2 sqrt(nM)/r, 8/r} fails (" +
                                    detail::fmt(quarter) + " <= " + detail::fmt(need) +
                                    "); supply constants.c and constants.c_prime");
        }
        if (!c) {
            c = 8.0 / pc.r;
        }
        if (!c_prime) {
            c_prime = std::sqrt(nM);
        }
    }
    detail::require_positive(*c, "c");
    detail::require_positive(*c_prime, "c'");
    const double delta = *c / quarter;
    const double delta_prime = *c_prime / quarter;
    if (!(2.0 * delta_prime < pc.r)) {
        throw PreconditionError("2c'T^{-1/4} < r violated: 2c'T^{-1/4} = " + detail::fmt(2.0 * delta_prime) +
                                ", r = " + detail::fmt(pc.r));
    }
    if (!(delta < 1.0)) {
        throw PreconditionError("c T^{-1/4} < 1 violated: c T^{-1/4} = " + detail::fmt(delta));
    }
    LearnerParams p;
    p.kind = LearnerKind::SoBgd;
    p.T = T;
    p.n = pc.n;
    p.R = pc.R;
    p.r = pc.r;
    p.G = pc.G;
    p.M = pc.M;
    p.c = *c;
    p.c_prime = *c_prime;
    p.delta = delta;
    p.delta_prime = delta_prime;
    p.eta = {pc.r / (4.0 * std::sqrt(nM)) * std::pow(t, -0.75)};
    detail::set_blocks(p, 1);
    return p;
}

/// Vanilla projected OGD with eta = R / (G_f sqrt(T)).
inline LearnerParams exact_ogd_params(double R, double G, std::size_t T) {
    detail::require_positive(R, "R");
    detail::require_horizon(T);
    LearnerParams p;
    p.kind = LearnerKind::ExactOgd;
    p.T = T;
    p.R = R;
    p.G = G;
    p.eta = {R / (detail::nonzero_or_one(G) * std::sqrt(static_cast<double>(T)))};
    detail::set_blocks(p, 1);
    return p;
}

/// Guarantees evaluated at a run's actual parameters.
struct TheoryBounds {
    /// "adaptive", "static", or "expected adaptive".
    std::string regret_kind;
    double regret = 0.0;
    /// "loo", "so", or "none".
    std::string oracle;
    double oracle_calls = 0.0;
};

/// Regret and oracle-call bounds of the learner's guarantee, evaluated from the
/// parameter values in `p` (rounded K, actual eta, eps, delta).
inline TheoryBounds theory_bounds(const LearnerParams& p) {
    const double T = static_cast<double>(p.T);
    const double K = static_cast<double>(p.K);
    const double blocks = static_cast<double>(p.blocks);
    const double R = p.R;
    const double r = p.r;
    const double G = p.G;
    const double nM = static_cast<double>(p.n) * p.M;
    TheoryBounds b;
    switch (p.kind) {
        case LearnerKind::LooBogd: {
            const double eta = p.step(1);
            const double eps = p.tolerance(1);
            b.regret_kind = "adaptive";
            b.regret = G * std::sqrt(3.0 * eps) * T + 4.0 * R * G * K + 4.0 * R * R / eta + 0.5 * G * G * K * eta * T;
            b.oracle = "loo";
            const double kg = K * eta * G;
            b.oracle_calls =
                blocks * (8.5 + 5.5 * kg * kg / eps + kg * kg * kg * kg / (eps * eps)) * 27.0 * R * R / eps;
            break;
        }
        case LearnerKind::LooBogdStronglyConvex: {
            b.regret_kind = "static";
            b.regret = 36.0 * std::cbrt(G * G * G * G * R * R / p.alpha) * std::pow(T, 2.0 / 3.0) *
                       (1.0 + (2.0 / 3.0) * std::log(std::sqrt(T) * G / (p.alpha * R)));
            b.oracle = "loo";
            b.oracle_calls = 0.94 * T;
            break;
        }
        case LearnerKind::LooBbgd: {
            const double eta = p.step(1);
            const double d = p.delta;
            b.regret_kind = "expected adaptive";
            b.regret = (3.0 + R / r) * G * d * T + (nM / std::sqrt(K) + d * G) * T +
                       4.0 * R * K * (nM / (d * std::sqrt(K)) + G) + 4.0 * R * R / eta +
                       0.5 * eta * (nM * nM / (d * d) + K * G * G) * T;
            b.oracle = "loo";
            const double e4 = eta * eta * eta * eta;
            b.oracle_calls = (T / K) *
                             (54.0 * e4 * K * K * nM * nM * nM * nM / std::pow(d, 8) +
                              108.0 * e4 * K * K * K * nM * nM * G * G / std::pow(d, 6) +
                              18.0 * e4 * K * K * K * K * G * G * G * G / std::pow(d, 4) + 19.0) *
                             81.0 * R * R / (d * d);
            break;
        }
        case LearnerKind::SoOgd: {
            const double eta = p.step(1);
            const double d = p.delta;
            b.regret_kind = "adaptive";
            b.regret = (G * R * d + 0.5 * G * G * eta) * T + 2.0 * R * R / eta;
            b.oracle = "so";
            b.oracle_calls = (2.0 * R * G / (r * r)) * (eta / d) * T + (G * G / (r * r)) * (eta * eta / (d * d)) * T + T;
            break;
        }
        case LearnerKind::SoBgd: {
            const double eta = p.step(1);
            const double d = p.delta;
            const double dp = p.delta_prime;
            b.regret_kind = "expected adaptive";
            b.regret = G * (3.0 * dp + R * (dp / r + d + d * dp / r)) * T + R / eta + 0.5 * nM * nM * (eta / (dp * dp)) * T;
            b.oracle = "so";
            b.oracle_calls = (1.0 + (8.0 * R * nM / (r * r)) * eta / (d * dp) +
                              (4.0 * nM * nM / (r * r)) * eta * eta / (d * d * dp * dp)) *
                             T;
            break;
        }
        case LearnerKind::ExactOgd: {
            const double eta = p.step(1);
            b.regret_kind = "adaptive";
            b.regret = 2.0 * R * R / eta + 0.5 * eta * G * G * T;
            b.oracle = "none";
            b.oracle_calls = 0.0;
            break;
        }
    }
    return b;
}

/// Bookkeeping of one infeasible-projection call made during a run.
struct ProjectionRecord {
    /// Block index (blocked learners) or round index (per-round learners) that consumed it.
    std::size_t index = 0;
    std::size_t iterations = 0;
    std::uint64_t loo_calls = 0;
    std::uint64_t so_calls = 0;
    double iteration_budget = 0.0;
    std::size_t max_inner_calls = 0;
    std::size_t inner_budget = 0;
    bool within_budget = true;
};

struct RunTrace {
    std::string learner;
    std::uint64_t seed = 0;
    /// Played point per round (x_t, or z_t for bandit learners).
    std::vector<Vector> played;
    /// f_t at the played point.
    std::vector<double> loss;
    std::vector<std::uint64_t> loo_calls_cum;
    std::vector<std::uint64_t> so_calls_cum;
    /// 1-based block of each round; equals t for per-round learners.
    std::vector<std::size_t> block_index;
    /// Norm of the subgradient used in the update (full-information learners only).
    std::vector<double> grad_norm;
    std::vector<ProjectionRecord> projections;
    OracleCounters totals;
    /// Rounds whose played point failed the membership test.
    std::size_t infeasible_rounds = 0;
    double wall_seconds = 0.0;

    std::size_t horizon() const { return played.size(); }
    std::size_t budget_violations() const {
        std::size_t k = 0;
        for (const ProjectionRecord& rec : projections) {
            k += rec.within_budget ? 0 : 1;
        }
        return k;
    }
    double total_loss() const {
        double s = 0.0;
        for (double v : loss) {
            s += v;
        }
        return s;
    }
};

/// Membership slack used when auditing played points, relative to R.
inline constexpr double kPlayTolerance = 1e-9;

namespace detail {

inline void record_round(RunTrace& trace, const FeasibleSet& set, const Vector& point, double value,
                         const OracleCounters& counters, std::size_t block) {
    if (!set.contains(point, kPlayTolerance)) {
        ++trace.infeasible_rounds;
    }
    trace.played.push_back(point);
    trace.loss.push_back(value);
    trace.loo_calls_cum.push_back(counters.loo_calls);
    trace.so_calls_cum.push_back(counters.so_calls);
    trace.block_index.push_back(block);
}

inline ProjectionRecord record_of(const CipResult& res, std::size_t index) {
    return {index,          res.iterations,    res.loo_calls,         res.so_calls,
            res.iteration_budget, res.max_inner_calls, res.inner_budget, res.within_budget()};
}

inline void reserve(RunTrace& trace, std::size_t T) {
    trace.played.reserve(T);
    trace.loss.reserve(T);
    trace.loo_calls_cum.reserve(T);
    trace.so_calls_cum.reserve(T);
    trace.block_index.reserve(T);
}

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline void check_schedule(const FeasibleSet& set, const LossSchedule& schedule, const LearnerParams& p) {
    if (schedule.dimension() != set.dimension()) {
        throw InvalidArgument("loss dimension " + std::to_string(schedule.dimension()) +
                              " does not match set dimension " + std::to_string(set.dimension()));
    }
    if (schedule.horizon() != p.T) {
        throw InvalidArgument("schedule horizon " + std::to_string(schedule.horizon()) +
                              " does not match T = " + std::to_string(p.T));
    }
}

}  // namespace detail

/// Infeasible-projection oracle: maps y to a CipResult whose `projection` is the new iterate.
using IpOracle = std::function<CipResult(const Vector&, OracleCounters&)>;

/// Online gradient descent without feasibility: play y_t, step along -eta_t grad, and
/// replace the result by the oracle's infeasible projection. `eta` maps t (1-based) to eta_t.
inline RunTrace ogd_wf_run(const FeasibleSet& set, const LossSchedule& schedule,
                           const std::function<double(std::size_t)>& eta, const IpOracle& oracle, const Vector& y1,
                           const std::string& name = "ogd_wf") {
    if (schedule.dimension() != set.dimension()) {
        throw InvalidArgument("ogd_wf_run: loss and set dimensions differ");
    }
    require_dimension(y1, set.dimension(), "ogd_wf_run y1");
    detail::Stopwatch clock;
    RunTrace trace;
    trace.learner = name;
    const std::size_t T = schedule.horizon();
    detail::reserve(trace, T);
    trace.grad_norm.reserve(T);
    OracleCounters counters;
    Vector y = y1;
    for (std::size_t t = 1; t <= T; ++t) {
        const LossEval ev = schedule.at(t).eval(y);
        detail::record_round(trace, set, y, ev.value, counters, t);
        trace.grad_norm.push_back(ev.subgradient.norm());
        const CipResult res = oracle(y - eta(t) * ev.subgradient, counters);
        trace.projections.push_back(detail::record_of(res, t));
        y = res.projection;
        trace.loo_calls_cum.back() = counters.loo_calls;
        trace.so_calls_cum.back() = counters.so_calls;
    }
    trace.totals = counters;
    trace.wall_seconds = clock.seconds();
    return trace;
}

namespace detail {

/// Shared block loop of LOO-BOGD and LOO-BBGD.
///
/// Block m plays x_{m-1}; the infeasible projection of the previous block's endpoint
/// (anchored at x_{m-2}) is computed at the start of block m and first used in block m+1.
/// With `rng` the block plays x_{m-1} + delta u_t and feeds the one-point estimator;
/// without it, the subgradient at y~_{m-1} is used.
inline RunTrace blocked_run(const FeasibleSet& target, const FeasibleSet& audit, const LossSchedule& schedule,
                            const LearnerParams& p, Rng* rng) {
    detail::Stopwatch clock;
    RunTrace trace;
    trace.learner = to_string(p.kind);
    detail::reserve(trace, p.T);
    if (!rng) {
        trace.grad_norm.reserve(p.T);
    }
    const std::size_t n = target.dimension();
    OracleCounters counters;

    const Vector x0 = target.reference_point();
    Vector anchor = x0;      // x_{m-2}
    Vector play_x = x0;      // x_{m-1}
    Vector play_ytil = x0;   // y~_{m-1}
    Vector next_x = x0;      // x_m
    Vector next_ytil = x0;   // y~_m
    Vector y = x0;           // y_{(m-1)K+1} before the reset, running sum after

    std::size_t t = 0;
    for (std::size_t m = 1; m <= p.blocks; ++m) {
        if (m >= 2) {
            const CipResult res = cip_loo(target, anchor, y, p.tolerance(m), counters);
            trace.projections.push_back(record_of(res, m));
            next_x = res.anchor;
            next_ytil = res.projection;
        }
        y = play_ytil;
        const double eta = p.step(m);
        const std::size_t block_end = std::min(p.T, m * p.K);
        while (t < block_end) {
            ++t;
            const Loss& f = schedule.at(t);
            if (rng) {
                const Vector u = sample_unit_sphere(*rng, n);
                const Vector z = play_x + p.delta * u;
                const double value = f.value(z);
                record_round(trace, audit, z, value, counters, m);
                y -= eta * bandit_gradient_estimate(value, u, n, p.delta);
            } else {
                const double value = f.value(play_x);
                record_round(trace, audit, play_x, value, counters, m);
                const LossEval ev = f.eval(play_ytil);
                trace.grad_norm.push_back(ev.subgradient.norm());
                y -= eta * ev.subgradient;
            }
        }
        anchor = play_x;
        play_x = next_x;
        play_ytil = next_ytil;
    }
    trace.totals = counters;
    trace.wall_seconds = clock.seconds();
    return trace;
}

}  // namespace detail

/// Blocked OGD with the LOO-based close infeasible projection; full information.
inline RunTrace loo_bogd_run(const FeasibleSet& set, const LossSchedule& schedule, const LearnerParams& p) {
    if (p.kind != LearnerKind::LooBogd && p.kind != LearnerKind::LooBogdStronglyConvex) {
        throw InvalidArgument("loo_bogd_run: parameters are for " + to_string(p.kind));
    }
    detail::check_schedule(set, schedule, p);
    return detail::blocked_run(set, set, schedule, p, nullptr);
}

/// Blocked bandit gradient descent over (1 - delta/r) K with the LOO-based projection at
/// tolerance delta^2 / 3.
inline RunTrace loo_bbgd_run(const SetPtr& set, const LossSchedule& schedule, const LearnerParams& p,
                             std::uint64_t seed) {
    if (p.kind != LearnerKind::LooBbgd) {
        throw InvalidArgument("loo_bbgd_run: parameters are for " + to_string(p.kind));
    }
    detail::check_schedule(*set, schedule, p);
    if (!(p.delta > 0.0 && p.delta <= p.r && p.r <= set->inner_radius() * (1.0 + 1e-12))) {
        throw PreconditionError("loo_bbgd_run: need 0 < delta <= r <= inner radius");
    }
    const auto squeezed = squeeze(set, 1.0 - p.delta / p.r);
    Rng rng(seed);
    RunTrace trace = detail::blocked_run(*squeezed, *set, schedule, p, &rng);
    trace.seed = seed;
    return trace;
}

/// OGD whose projection is the SO-based infeasible projection with squeeze (delta, 0).
inline RunTrace so_ogd_run(const FeasibleSet& set, const LossSchedule& schedule, const LearnerParams& p) {
    if (p.kind != LearnerKind::SoOgd) {
        throw InvalidArgument("so_ogd_run: parameters are for " + to_string(p.kind));
    }
    detail::check_schedule(set, schedule, p);
    const double eta = p.step(1);
    const IpOracle oracle = [&](const Vector& y, OracleCounters& counters) {
        return cip_so(set, p.r, p.delta, 0.0, y, counters);
    };
    return ogd_wf_run(
        set, schedule, [eta](std::size_t) { return eta; }, oracle,
        Vector::Zero(static_cast<Eigen::Index>(set.dimension())), to_string(p.kind));
}

/// Bandit OGD: play y~_t + delta' u_t, step along the one-point estimator, then the
/// SO-based infeasible projection with squeeze (delta, delta').
inline RunTrace so_bgd_run(const FeasibleSet& set, const LossSchedule& schedule, const LearnerParams& p,
                           std::uint64_t seed) {
    if (p.kind != LearnerKind::SoBgd) {
        throw InvalidArgument("so_bgd_run: parameters are for " + to_string(p.kind));
    }
    detail::check_schedule(set, schedule, p);
    detail::Stopwatch clock;
    RunTrace trace;
    trace.learner = to_string(p.kind);
    trace.seed = seed;
    detail::reserve(trace, p.T);
    const std::size_t n = set.dimension();
    const double eta = p.step(1);
    Rng rng(seed);
    OracleCounters counters;
    Vector ytil = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t t = 1; t <= p.T; ++t) {
        const Vector u = sample_unit_sphere(rng, n);
        const Vector z = ytil + p.delta_prime * u;
        const double value = schedule.at(t).value(z);
        detail::record_round(trace, set, z, value, counters, t);
        const Vector g = bandit_gradient_estimate(value, u, n, p.delta_prime);
        const CipResult res = cip_so(set, p.r, p.delta, p.delta_prime, ytil - eta * g, counters);
        trace.projections.push_back(detail::record_of(res, t));
        ytil = res.projection;
        trace.so_calls_cum.back() = counters.so_calls;
    }
    trace.totals = counters;
    trace.wall_seconds = clock.seconds();
    return trace;
}

/// Projected OGD with exact Euclidean projections. Baseline only; projections are not counted.
inline RunTrace exact_ogd_run(const FeasibleSet& set, const LossSchedule& schedule, const LearnerParams& p) {
    if (p.kind != LearnerKind::ExactOgd) {
        throw InvalidArgument("exact_ogd_run: parameters are for " + to_string(p.kind));
    }
    detail::check_schedule(set, schedule, p);
    const double eta = p.step(1);
    const IpOracle oracle = [&](const Vector& y, OracleCounters&) {
        CipResult res;
        res.projection = exact_project(set, y).point;
        res.iterations = 1;
        res.iteration_budget = 1.0;
        return res;
    };
    return ogd_wf_run(
        set, schedule, [eta](std::size_t) { return eta; }, oracle, set.reference_point(), to_string(p.kind));
}

}  // namespace pfoco
