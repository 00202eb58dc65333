#pragma once

#include "pfoco/learners.hpp"
#include "pfoco/regret.hpp"
#include "pfoco/schedule.hpp"
#include "pfoco/sets.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace pfoco {

using Json = nlohmann::json;

/// Raised for malformed or inconsistent experiment configurations.
class ConfigError : public InvalidArgument {
  public:
    using InvalidArgument::InvalidArgument;
};

struct ExperimentConfig {
    Json set_json;
    Json loss_json;
    LearnerKind learner = LearnerKind::LooBogd;
    std::size_t T = 0;
    std::optional<double> c;
    std::optional<double> c_prime;
    std::optional<double> alpha;
    std::vector<std::uint64_t> seeds{0};
    IntervalPolicy policy = IntervalPolicy::Geometric;
    std::vector<Interval> extra_intervals;
    std::optional<double> comparator_tol;
    std::string output_dir;
};

namespace detail {

inline void only_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            known = known || item.key() == key;
        }
        if (!known) {
            throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
        }
    }
}

inline const Json& required(const Json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) {
        throw ConfigError(where + ": missing key \"" + key + "\"");
    }
    return obj.at(key);
}

inline double number(const Json& v, const std::string& where) {
    if (!v.is_number()) {
        throw ConfigError(where + ": expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(where + ": expected a finite number");
    }
    return x;
}

inline double positive(const Json& v, const std::string& where) {
    const double x = number(v, where);
    if (!(x > 0.0)) {
        throw ConfigError(where + ": must be positive");
    }
    return x;
}

inline std::uint64_t count(const Json& v, const std::string& where) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(where + ": expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

inline std::size_t dimension(const Json& v, const std::string& where) {
    const std::uint64_t n = count(v, where);
    if (n == 0) {
        throw ConfigError(where + ": must be at least 1");
    }
    return static_cast<std::size_t>(n);
}

inline Vector vector_of(const Json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) {
        throw ConfigError(where + ": expected a nonempty array of numbers");
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = number(v[i], where + "[" + std::to_string(i) + "]");
    }
    return out;
}

inline std::string text(const Json& v, const std::string& where) {
    if (!v.is_string()) {
        throw ConfigError(where + ": expected a string");
    }
    return v.get<std::string>();
}

/// Rethrows construction errors of library objects as configuration errors.
template <class F>
auto as_config_error(const std::string& where, F&& make) -> decltype(make()) {
    try {
        return make();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& err) {
        throw ConfigError(where + ": " + err.what());
    }
}

}  // namespace detail

/// Builds a feasible set from its JSON description.
///
///   {"kind": "ball", "dimension": n, "radius": R}
///   {"kind": "box", "lower": [...], "upper": [...]}  or  {"kind": "box", "dimension": n, "half_width": h}
///   {"kind": "simplex", "dimension": n, "scale": s}
///   {"kind": "l1_ball", "dimension": n, "radius": rho}
///   {"kind": "polytope", "normals": [[...], ...], "offsets": [...]}
inline SetPtr make_set(const Json& desc) {
    const std::string where = "set";
    if (!desc.is_object()) {
        throw ConfigError("set: expected an object");
    }
    const std::string kind = detail::text(detail::required(desc, "kind", where), "set.kind");
    if (kind == "ball") {
        detail::only_keys(desc, {"kind", "dimension", "radius"}, where);
        const std::size_t n = detail::dimension(detail::required(desc, "dimension", where), "set.dimension");
        const double radius = desc.contains("radius") ? detail::positive(desc.at("radius"), "set.radius") : 1.0;
        return std::make_shared<const Ball>(n, radius);
    }
    if (kind == "box") {
        detail::only_keys(desc, {"kind", "dimension", "half_width", "lower", "upper"}, where);
        if (desc.contains("lower") || desc.contains("upper")) {
            if (desc.contains("dimension") || desc.contains("half_width")) {
                throw ConfigError("set: give either lower/upper or dimension/half_width for a box");
            }
            Vector lo = detail::vector_of(detail::required(desc, "lower", where), "set.lower");
            Vector hi = detail::vector_of(detail::required(desc, "upper", where), "set.upper");
            return detail::as_config_error(where, [&] { return SetPtr(std::make_shared<const Box>(lo, hi)); });
        }
        const std::size_t n = detail::dimension(detail::required(desc, "dimension", where), "set.dimension");
        const double h = desc.contains("half_width") ? detail::positive(desc.at("half_width"), "set.half_width") : 1.0;
        return std::make_shared<const Box>(Box::cube(n, h));
    }
    if (kind == "simplex") {
        detail::only_keys(desc, {"kind", "dimension", "scale"}, where);
        const std::size_t n = detail::dimension(detail::required(desc, "dimension", where), "set.dimension");
        const double scale = desc.contains("scale") ? detail::positive(desc.at("scale"), "set.scale") : 1.0;
        return std::make_shared<const Simplex>(n, scale);
    }
    if (kind == "l1_ball") {
        detail::only_keys(desc, {"kind", "dimension", "radius"}, where);
        const std::size_t n = detail::dimension(detail::required(desc, "dimension", where), "set.dimension");
        const double radius = desc.contains("radius") ? detail::positive(desc.at("radius"), "set.radius") : 1.0;
        return std::make_shared<const L1Ball>(n, radius);
    }
    if (kind == "polytope") {
        detail::only_keys(desc, {"kind", "normals", "offsets"}, where);
        const Json& rows = detail::required(desc, "normals", where);
        const Vector b = detail::vector_of(detail::required(desc, "offsets", where), "set.offsets");
        if (!rows.is_array() || rows.size() != static_cast<std::size_t>(b.size())) {
            throw ConfigError("set.normals: expected one row per offset");
        }
        const Vector first = detail::vector_of(rows[0], "set.normals[0]");
        Eigen::MatrixXd A(b.size(), first.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Vector row = detail::vector_of(rows[i], "set.normals[" + std::to_string(i) + "]");
            if (row.size() != first.size()) {
                throw ConfigError("set.normals: rows of unequal length");
            }
            A.row(static_cast<Eigen::Index>(i)) = row.transpose();
        }
        return detail::as_config_error(where, [&] { return SetPtr(std::make_shared<const Polytope>(A, b)); });
    }
    throw ConfigError("set.kind: unknown kind \"" + kind + "\" (ball, box, simplex, l1_ball, polytope)");
}

/// Builds the loss schedule from its JSON description. `seed` is used unless the description
/// pins its own "seed".
///
///   {"kind": "zero"}
///   {"kind": "random_linear", "scale": s}
///   {"kind": "random_quadratic", "alpha": a, "center_radius": c}
///   {"kind": "switching", "loss": "linear" | "quadratic" | "absdev", "alpha": a,
///    "segments": [{"length": L, "target": [...]}, ...]}
inline LossSchedule make_schedule(const Json& desc, std::size_t T, std::size_t n, double R, std::uint64_t seed) {
    const std::string where = "losses";
    if (!desc.is_object()) {
        throw ConfigError("losses: expected an object");
    }
    const std::string kind = detail::text(detail::required(desc, "kind", where), "losses.kind");
    const std::uint64_t s = desc.contains("seed") ? detail::count(desc.at("seed"), "losses.seed") : seed;
    if (kind == "zero") {
        detail::only_keys(desc, {"kind", "seed"}, where);
        return make_zero_schedule(T, n, R);
    }
    if (kind == "random_linear") {
        detail::only_keys(desc, {"kind", "seed", "scale"}, where);
        const double scale = desc.contains("scale") ? detail::positive(desc.at("scale"), "losses.scale") : 1.0;
        return make_random_linear_schedule(T, n, scale, R, s);
    }
    if (kind == "random_quadratic") {
        detail::only_keys(desc, {"kind", "seed", "alpha", "center_radius"}, where);
        const double alpha = desc.contains("alpha") ? detail::positive(desc.at("alpha"), "losses.alpha") : 1.0;
        const double centre =
            desc.contains("center_radius") ? detail::number(desc.at("center_radius"), "losses.center_radius") : 0.0;
        if (centre < 0.0) {
            throw ConfigError("losses.center_radius: must be nonnegative");
        }
        return make_random_quadratic_schedule(T, n, alpha, centre, R, s);
    }
    if (kind == "switching") {
        detail::only_keys(desc, {"kind", "seed", "loss", "alpha", "segments"}, where);
        const std::string loss =
            desc.contains("loss") ? detail::text(desc.at("loss"), "losses.loss") : std::string("linear");
        LossKind lk = LossKind::Linear;
        if (loss == "quadratic") {
            lk = LossKind::Quadratic;
        } else if (loss == "absdev") {
            lk = LossKind::AbsoluteDeviation;
        } else if (loss != "linear") {
            throw ConfigError("losses.loss: unknown loss \"" + loss + "\" (linear, quadratic, absdev)");
        }
        const double alpha = desc.contains("alpha") ? detail::positive(desc.at("alpha"), "losses.alpha") : 1.0;
        const Json& segs = detail::required(desc, "segments", where);
        if (!segs.is_array() || segs.empty()) {
            throw ConfigError("losses.segments: expected a nonempty array");
        }
        std::vector<Segment> segments;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const std::string w = "losses.segments[" + std::to_string(i) + "]";
            detail::only_keys(segs[i], {"length", "target"}, w);
            Segment seg;
            seg.length = static_cast<std::size_t>(detail::count(detail::required(segs[i], "length", w), w + ".length"));
            seg.target = detail::vector_of(detail::required(segs[i], "target", w), w + ".target");
            if (static_cast<std::size_t>(seg.target.size()) != n) {
                throw ConfigError(w + ".target: dimension " + std::to_string(seg.target.size()) +
                                  " does not match the set dimension " + std::to_string(n));
            }
            segments.push_back(std::move(seg));
        }
        return detail::as_config_error(where, [&] { return make_switching_schedule(T, segments, lk, s, R, alpha); });
    }
    throw ConfigError("losses.kind: unknown kind \"" + kind +
                      "\" (zero, random_linear, random_quadratic, switching)");
}

namespace detail {

inline ExperimentConfig parse_config_fields(const Json& root) {
    detail::only_keys(root, {"set", "losses", "learner", "T", "constants", "seeds", "intervals", "comparator_tol",
                             "output"},
                      "config");
    ExperimentConfig cfg;
    cfg.set_json = detail::required(root, "set", "config");
    cfg.loss_json = detail::required(root, "losses", "config");
    const std::string learner = detail::text(detail::required(root, "learner", "config"), "learner");
    const auto kind = learner_from_string(learner);
    if (!kind) {
        throw ConfigError("learner: unknown learner \"" + learner +
                          "\" (loo_bogd, loo_bogd_sc, loo_bbgd, so_ogd, so_bgd, exact_ogd_baseline)");
    }
    cfg.learner = *kind;
    cfg.T = static_cast<std::size_t>(detail::count(detail::required(root, "T", "config"), "T"));
    if (cfg.T == 0) {
        throw ConfigError("T: must be at least 1");
    }
    if (root.contains("constants")) {
        const Json& k = root.at("constants");
        detail::only_keys(k, {"c", "c_prime", "alpha"}, "constants");
        if (k.contains("c")) {
            cfg.c = detail::positive(k.at("c"), "constants.c");
        }
        if (k.contains("c_prime")) {
            cfg.c_prime = detail::positive(k.at("c_prime"), "constants.c_prime");
        }
        if (k.contains("alpha")) {
            cfg.alpha = detail::positive(k.at("alpha"), "constants.alpha");
        }
    }
    if (root.contains("seeds")) {
        const Json& seeds = root.at("seeds");
        if (!seeds.is_array() || seeds.empty()) {
            throw ConfigError("seeds: expected a nonempty array of nonnegative integers");
        }
        cfg.seeds.clear();
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            cfg.seeds.push_back(detail::count(seeds[i], "seeds[" + std::to_string(i) + "]"));
        }
    }
    if (root.contains("intervals")) {
        const Json& iv = root.at("intervals");
        detail::only_keys(iv, {"policy", "extra"}, "intervals");
        if (iv.contains("policy")) {
            const std::string name = detail::text(iv.at("policy"), "intervals.policy");
            const auto policy = interval_policy_from_string(name);
            if (!policy) {
                throw ConfigError("intervals.policy: unknown policy \"" + name + "\" (geometric, exhaustive, single)");
            }
            cfg.policy = *policy;
        }
        if (iv.contains("extra")) {
            const Json& extra = iv.at("extra");
            if (!extra.is_array()) {
                throw ConfigError("intervals.extra: expected an array of [first, last] pairs");
            }
            for (std::size_t i = 0; i < extra.size(); ++i) {
                const std::string w = "intervals.extra[" + std::to_string(i) + "]";
                if (!extra[i].is_array() || extra[i].size() != 2) {
                    throw ConfigError(w + ": expected [first, last]");
                }
                const auto first = static_cast<std::size_t>(detail::count(extra[i][0], w));
                const auto last = static_cast<std::size_t>(detail::count(extra[i][1], w));
                if (first < 1 || last < first || last > cfg.T) {
                    throw ConfigError(w + ": need 1 <= first <= last <= T");
                }
                cfg.extra_intervals.push_back({first, last});
            }
        }
    }
    if (root.contains("comparator_tol")) {
        cfg.comparator_tol = detail::positive(root.at("comparator_tol"), "comparator_tol");
    }
    if (root.contains("output")) {
        const Json& out = root.at("output");
        detail::only_keys(out, {"dir"}, "output");
        if (out.contains("dir")) {
            cfg.output_dir = detail::text(out.at("dir"), "output.dir");
        }
    }
    return cfg;
}

}  // namespace detail

/// Everything a run of one seed needs, with all preconditions checked.
struct PreparedRun {
    SetPtr set;
    LossSchedule schedule;
    LearnerParams params;
    double comparator_tol = 0.0;
};

/// Builds set, schedule, and learner parameters for `seed` and checks every
/// precondition of the learner's guarantee. Violations raise ConfigError naming the
/// broken inequality.
inline PreparedRun prepare_run(const ExperimentConfig& cfg, std::uint64_t seed) {
    SetPtr set = make_set(cfg.set_json);
    LossSchedule schedule = make_schedule(cfg.loss_json, cfg.T, set->dimension(), set->outer_radius(), seed);
    if (is_bandit(cfg.learner) && !schedule.oblivious()) {
        throw ConfigError("bandit learners need an oblivious loss schedule");
    }
    const ProblemConstants pc = problem_constants(*set, schedule);
    if (cfg.alpha && cfg.learner != LearnerKind::LooBogdStronglyConvex) {
        throw ConfigError("constants.alpha only applies to loo_bogd_sc");
    }
    if (cfg.c_prime && cfg.learner != LearnerKind::SoBgd) {
        throw ConfigError("constants.c_prime only applies to so_bgd");
    }
    if (cfg.c && (cfg.learner == LearnerKind::LooBogd || cfg.learner == LearnerKind::LooBogdStronglyConvex ||
                  cfg.learner == LearnerKind::ExactOgd)) {
        throw ConfigError("constants.c does not apply to " + to_string(cfg.learner));
    }
    const bool needs_origin = cfg.learner == LearnerKind::LooBbgd || cfg.learner == LearnerKind::SoOgd ||
                              cfg.learner == LearnerKind::SoBgd;
    if (needs_origin && !(set->inner_radius() > 0.0)) {
        throw ConfigError(to_string(cfg.learner) + " needs a set containing a ball r B with r > 0; " + set->kind() +
                          " has none");
    }
    LearnerParams params = detail::as_config_error("learner", [&] {
        switch (cfg.learner) {
            case LearnerKind::LooBogd:
                return loo_bogd_params(pc.R, pc.G, cfg.T);
            case LearnerKind::LooBogdStronglyConvex: {
                const double alpha = cfg.alpha.value_or(pc.alpha);
                if (!(pc.alpha > 0.0)) {
                    throw ConfigError("loo_bogd_sc needs strongly convex losses (quadratic with alpha > 0)");
                }
                if (alpha > pc.alpha * (1.0 + 1e-12)) {
                    throw ConfigError("constants.alpha exceeds the losses' strong convexity " + detail::fmt(pc.alpha));
                }
                return sc_params(pc.R, pc.G, alpha, cfg.T);
            }
            case LearnerKind::LooBbgd:
                return loo_bbgd_params(pc, cfg.T, cfg.c);
            case LearnerKind::SoOgd:
                return so_ogd_params(pc, cfg.T, cfg.c);
            case LearnerKind::SoBgd:
                return so_bgd_params(pc, cfg.T, cfg.c, cfg.c_prime);
            case LearnerKind::ExactOgd:
                return exact_ogd_params(pc.R, pc.G, cfg.T);
        }
        throw ConfigError("unhandled learner");
    });
    params.n = pc.n;
    params.M = pc.M;
    params.r = pc.r;
    const double tol = cfg.comparator_tol.value_or(default_comparator_tol(pc.G, pc.R));
    return {std::move(set), std::move(schedule), std::move(params), tol};
}

/// Strict parse of an experiment configuration. Unknown keys anywhere are rejected;
/// step sizes, tolerances, and block sizes are derived and cannot be set. The set,
/// losses, and learner preconditions are checked for every listed seed.
inline ExperimentConfig parse_config_json(const Json& root) {
    ExperimentConfig cfg = detail::parse_config_fields(root);
    for (std::uint64_t seed : cfg.seeds) {
        prepare_run(cfg, seed);
    }
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    Json root;
    try {
        root = Json::parse(in);
    } catch (const Json::parse_error& err) {
        throw ConfigError("config " + path + " is not valid JSON: " + err.what());
    }
    return parse_config_json(root);
}

}  // namespace pfoco
