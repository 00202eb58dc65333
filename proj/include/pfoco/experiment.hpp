#pragma once

#include "pfoco/config.hpp"
#include "pfoco/trace_io.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace pfoco {

/// Runs the configured learner once on a prepared problem.
inline RunTrace run_learner(const PreparedRun& run, std::uint64_t seed) {
    RunTrace trace;
    switch (run.params.kind) {
        case LearnerKind::LooBogd:
        case LearnerKind::LooBogdStronglyConvex:
            trace = loo_bogd_run(*run.set, run.schedule, run.params);
            break;
        case LearnerKind::LooBbgd:
            trace = loo_bbgd_run(run.set, run.schedule, run.params, seed);
            break;
        case LearnerKind::SoOgd:
            trace = so_ogd_run(*run.set, run.schedule, run.params);
            break;
        case LearnerKind::SoBgd:
            trace = so_bgd_run(*run.set, run.schedule, run.params, seed);
            break;
        case LearnerKind::ExactOgd:
            trace = exact_ogd_run(*run.set, run.schedule, run.params);
            break;
    }
    trace.seed = seed;
    return trace;
}

/// Regret of a loss sequence on the configured interval family.
inline AdaptiveRegretReport evaluate_regret(const PreparedRun& run, const std::vector<double>& played_losses,
                                            IntervalPolicy policy, const std::vector<Interval>& extra) {
    const auto intervals = make_intervals(policy, run.schedule.horizon(), run.schedule.segments(), extra);
    return adaptive_regret(played_losses, run.schedule, run.set, intervals, run.comparator_tol, to_string(policy));
}

struct SeedOutcome {
    std::uint64_t seed = 0;
    LearnerParams params;
    TheoryBounds bounds;
    RunTrace trace;
    AdaptiveRegretReport regret;
    /// Regret on [1, T]; absent when that comparator cannot be certified.
    std::optional<IntervalRegret> full_horizon;
};

inline SeedOutcome run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    const PreparedRun run = prepare_run(cfg, seed);
    SeedOutcome out;
    out.seed = seed;
    out.params = run.params;
    out.bounds = theory_bounds(run.params);
    out.trace = run_learner(run, seed);
    std::vector<Interval> extra = cfg.extra_intervals;
    extra.push_back({1, cfg.T});
    out.regret = evaluate_regret(run, out.trace.loss, cfg.policy, extra);
    if (const IntervalRegret* full = out.regret.find({1, cfg.T})) {
        out.full_horizon = *full;
    }
    return out;
}

/// The regret figure compared against the bound: [1, T] regret for static guarantees,
/// the maximum interval regret otherwise.
inline std::optional<double> headline_regret(const SeedOutcome& o) {
    if (o.bounds.regret_kind == "static") {
        if (o.full_horizon) {
            return o.full_horizon->regret;
        }
        return std::nullopt;
    }
    if (o.regret.intervals.empty()) {
        return std::nullopt;
    }
    return o.regret.max_regret;
}

inline Json params_json(const LearnerParams& p) {
    Json j;
    j["learner"] = to_string(p.kind);
    j["T"] = p.T;
    j["n"] = p.n;
    j["K"] = p.K;
    j["blocks"] = p.blocks;
    j["full_blocks"] = p.full_blocks;
    j["eta_first"] = p.eta.empty() ? 0.0 : p.eta.front();
    j["eps_first"] = p.eps.empty() ? 0.0 : p.eps.front();
    j["delta"] = p.delta;
    j["delta_prime"] = p.delta_prime;
    j["c"] = p.c;
    j["c_prime"] = p.c_prime;
    j["alpha"] = p.alpha;
    j["R"] = p.R;
    j["r"] = p.r;
    j["G"] = p.G;
    j["M"] = p.M;
    return j;
}

inline Json interval_json(const Interval& iv) { return Json::array({iv.first, iv.last}); }

/// Full interval report: comparator, certificate, and regret per interval.
inline Json regret_report_json(const AdaptiveRegretReport& rep) {
    Json j;
    j["policy"] = rep.policy;
    j["comparator_tol"] = rep.comparator_tol;
    Json rows = Json::array();
    for (const IntervalRegret& ir : rep.intervals) {
        rows.push_back({{"interval", interval_json(ir.interval)},
                        {"comparator", std::vector<double>(ir.comparator.data(), ir.comparator.data() + ir.comparator.size())},
                        {"comparator_value", ir.comparator_value},
                        {"played_loss", ir.played_loss},
                        {"regret", ir.regret},
                        {"certificate", ir.certificate},
                        {"certificate_gap", ir.certificate_gap}});
    }
    j["intervals"] = rows;
    Json skipped = Json::array();
    for (const SkippedInterval& sk : rep.skipped) {
        skipped.push_back({{"interval", interval_json(sk.interval)}, {"reason", sk.reason}});
    }
    j["skipped"] = skipped;
    if (!rep.intervals.empty()) {
        j["max_regret"] = rep.max_regret;
        j["argmax"] = interval_json(rep.argmax);
    }
    return j;
}

/// Per-seed summary: parameters, bounds, oracle totals, regret, and ratios.
inline Json seed_summary_json(const SeedOutcome& o) {
    Json j;
    j["seed"] = o.seed;
    j["params"] = params_json(o.params);
    j["bounds"] = {{"regret_kind", o.bounds.regret_kind},
                   {"regret", o.bounds.regret},
                   {"oracle", o.bounds.oracle},
                   {"oracle_calls", o.bounds.oracle_calls}};
    j["totals"] = {{"loo_calls", o.trace.totals.loo_calls},
                   {"so_calls", o.trace.totals.so_calls},
                   {"total_loss", o.trace.total_loss()},
                   {"infeasible_rounds", o.trace.infeasible_rounds},
                   {"projections", o.trace.projections.size()},
                   {"budget_violations", o.trace.budget_violations()}};
    Json reg;
    reg["policy"] = o.regret.policy;
    reg["intervals"] = o.regret.intervals.size();
    reg["skipped"] = o.regret.skipped.size();
    reg["comparator_tol"] = o.regret.comparator_tol;
    if (!o.regret.intervals.empty()) {
        reg["max_regret"] = o.regret.max_regret;
        reg["argmax"] = interval_json(o.regret.argmax);
    }
    if (o.full_horizon) {
        reg["full_horizon"] = o.full_horizon->regret;
    }
    j["regret"] = reg;
    const auto headline = headline_regret(o);
    const double calls = o.bounds.oracle == "loo"  ? static_cast<double>(o.trace.totals.loo_calls)
                         : o.bounds.oracle == "so" ? static_cast<double>(o.trace.totals.so_calls)
                                                   : 0.0;
    Json ratios;
    ratios["regret_over_bound"] = headline && o.bounds.regret > 0.0 ? Json(*headline / o.bounds.regret) : Json();
    ratios["calls_over_bound"] = o.bounds.oracle_calls > 0.0 ? Json(calls / o.bounds.oracle_calls) : Json();
    j["ratios"] = ratios;
    j["wall_seconds"] = o.trace.wall_seconds;
    return j;
}

/// Sample mean and standard error of `values`.
inline std::pair<double, double> mean_and_stderr(const std::vector<double>& values) {
    if (values.empty()) {
        return {0.0, 0.0};
    }
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    if (values.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double var = ss / static_cast<double>(values.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

/// Summary over seeds. Bandit guarantees are in expectation, so the mean headline
/// regret is what the bound covers.
inline Json experiment_summary_json(const ExperimentConfig& cfg, const std::vector<SeedOutcome>& outcomes) {
    Json j;
    j["learner"] = to_string(cfg.learner);
    j["T"] = cfg.T;
    j["seeds"] = cfg.seeds;
    Json runs = Json::array();
    std::vector<double> headline;
    double wall = 0.0;
    for (const SeedOutcome& o : outcomes) {
        runs.push_back(seed_summary_json(o));
        if (const auto h = headline_regret(o)) {
            headline.push_back(*h);
        }
        wall += o.trace.wall_seconds;
    }
    j["runs"] = runs;
    const auto [mean, se] = mean_and_stderr(headline);
    j["regret_mean"] = mean;
    j["regret_stderr"] = se;
    if (!outcomes.empty()) {
        j["regret_bound"] = outcomes.front().bounds.regret;
        j["regret_kind"] = outcomes.front().bounds.regret_kind;
        if (outcomes.front().bounds.regret > 0.0 && !headline.empty()) {
            j["mean_regret_over_bound"] = mean / outcomes.front().bounds.regret;
        }
    }
    j["wall_seconds"] = wall;
    return j;
}

/// File stem of one seed's output.
inline std::string run_stem(const ExperimentConfig& cfg, std::uint64_t seed) {
    return to_string(cfg.learner) + "_seed" + std::to_string(seed);
}

inline void write_json(const Json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidArgument("cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

/// Runs every seed, writing <stem>.csv and <stem>.json per seed and summary.json
/// into `out_dir`, which is created when missing.
inline std::vector<SeedOutcome> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<SeedOutcome> outcomes;
    for (std::uint64_t seed : cfg.seeds) {
        SeedOutcome o = run_seed(cfg, seed);
        const std::filesystem::path stem = std::filesystem::path(out_dir) / run_stem(cfg, seed);
        write_trace_csv(o.trace, stem.string() + ".csv");
        write_json(seed_summary_json(o), stem.string() + ".json");
        outcomes.push_back(std::move(o));
    }
    write_json(experiment_summary_json(cfg, outcomes), (std::filesystem::path(out_dir) / "summary.json").string());
    return outcomes;
}

}  // namespace pfoco
