#include "pfoco/pfoco.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

using namespace pfoco;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;

/// --out, then output.dir from the config, then $PFOCO_OUT_DIR, then ./pfoco_out.
std::string output_dir(const std::string& flag, const ExperimentConfig& cfg) {
    if (!flag.empty()) {
        return flag;
    }
    if (!cfg.output_dir.empty()) {
        return cfg.output_dir;
    }
    if (const char* env = std::getenv("PFOCO_OUT_DIR"); env && *env) {
        return env;
    }
    return "pfoco_out";
}

/// Reads [[first, last], ...] from a JSON file.
std::vector<Interval> read_interval_file(const std::string& path, std::size_t T) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("--intervals: \"" + path + "\" is neither a policy (geometric, exhaustive, single) nor a "
                          "readable file");
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& err) {
        throw ConfigError("interval file " + path + " is not valid JSON: " + err.what());
    }
    if (!j.is_array() || j.empty()) {
        throw ConfigError("interval file " + path + ": expected a nonempty array of [first, last] pairs");
    }
    std::vector<Interval> out;
    for (const Json& row : j) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_number_unsigned() || !row[1].is_number_unsigned()) {
            throw ConfigError("interval file " + path + ": every entry must be [first, last]");
        }
        const Interval iv{row[0].get<std::size_t>(), row[1].get<std::size_t>()};
        if (iv.first < 1 || iv.last < iv.first || iv.last > T) {
            throw ConfigError("interval file " + path + ": need 1 <= first <= last <= T");
        }
        out.push_back(iv);
    }
    return out;
}

int cmd_run(const std::string& config_path, const std::vector<std::uint64_t>& seeds, const std::string& out_flag) {
    ExperimentConfig cfg = parse_config(config_path);
    if (!seeds.empty()) {
        cfg.seeds = seeds;
        for (std::uint64_t seed : cfg.seeds) {
            prepare_run(cfg, seed);
        }
    }
    const std::string dir = output_dir(out_flag, cfg);
    const std::vector<SeedOutcome> outs = run_experiment(cfg, dir);
    for (const SeedOutcome& o : outs) {
        const auto headline = headline_regret(o);
        std::printf("%s seed %llu: regret %s (bound %.6g), loo %llu, so %llu, infeasible %zu, budget violations %zu\n",
                    to_string(cfg.learner).c_str(), static_cast<unsigned long long>(o.seed),
                    headline ? format_double(*headline).c_str() : "n/a", o.bounds.regret,
                    static_cast<unsigned long long>(o.trace.totals.loo_calls),
                    static_cast<unsigned long long>(o.trace.totals.so_calls), o.trace.infeasible_rounds,
                    o.trace.budget_violations());
    }
    std::printf("wrote %s\n", (std::filesystem::path(dir) / "summary.json").string().c_str());
    return 0;
}

int cmd_regret(const std::string& trace_path, const std::string& config_path, const std::string& intervals,
               std::optional<std::uint64_t> seed) {
    const ExperimentConfig cfg = parse_config(config_path);
    const PreparedRun run = prepare_run(cfg, seed.value_or(cfg.seeds.front()));
    const TraceTable table = read_trace_csv(trace_path);
    if (table.rows() != cfg.T) {
        throw ConfigError("trace has " + std::to_string(table.rows()) + " rounds but the config has T = " +
                          std::to_string(cfg.T));
    }
    std::vector<double> losses;
    losses.reserve(table.rows());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        if (static_cast<std::size_t>(table.x[i].size()) != run.set->dimension()) {
            throw ConfigError("trace point dimension does not match the set dimension");
        }
        losses.push_back(run.schedule.at(i + 1).value(table.x[i]));
    }
    std::vector<Interval> family;
    std::string name = "custom";
    if (intervals.empty()) {
        family = make_intervals(cfg.policy, cfg.T, run.schedule.segments(), cfg.extra_intervals);
        name = to_string(cfg.policy);
    } else if (const auto policy = interval_policy_from_string(intervals)) {
        family = make_intervals(*policy, cfg.T, run.schedule.segments(), cfg.extra_intervals);
        name = intervals;
    } else {
        family = read_interval_file(intervals, cfg.T);
    }
    const AdaptiveRegretReport rep = adaptive_regret(losses, run.schedule, run.set, family, run.comparator_tol, name);
    std::cout << regret_report_json(rep).dump(2) << '\n';
    return 0;
}

int cmd_validate(const std::string& config_path) {
    const ExperimentConfig cfg = parse_config(config_path);
    Json j;
    j["valid"] = true;
    Json runs = Json::array();
    for (std::uint64_t seed : cfg.seeds) {
        const PreparedRun run = prepare_run(cfg, seed);
        const TheoryBounds b = theory_bounds(run.params);
        runs.push_back({{"seed", seed},
                        {"params", params_json(run.params)},
                        {"bounds",
                         {{"regret_kind", b.regret_kind},
                          {"regret", b.regret},
                          {"oracle", b.oracle},
                          {"oracle_calls", b.oracle_calls}}}});
    }
    j["runs"] = runs;
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Projection-free online convex optimization experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string trace_path;
    std::string out_dir;
    std::string intervals;
    std::vector<std::uint64_t> seeds;
    std::optional<std::uint64_t> seed;

    CLI::App* run = app.add_subcommand("run", "Run every seed of a config and write traces and summaries");
    run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--seeds", seeds, "Override the config's seeds")->delimiter(',');
    run->add_option("--out", out_dir, "Output directory (default: output.dir, then $PFOCO_OUT_DIR, then ./pfoco_out)");

    CLI::App* regret = app.add_subcommand("regret", "Evaluate adaptive regret of a trace CSV");
    regret->add_option("trace", trace_path, "Trace CSV written by `run`")->required()->check(CLI::ExistingFile);
    regret->add_option("config", config_path, "Config the trace was produced with")->required()->check(CLI::ExistingFile);
    regret->add_option("--intervals", intervals, "Policy name (geometric, exhaustive, single) or JSON interval file");
    regret->add_option("--seed", seed, "Seed that generated the losses (default: first config seed)");

    CLI::App* validate = app.add_subcommand("validate", "Check a config and print the derived parameters");
    validate->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(config_path, seeds, out_dir);
        }
        if (regret->parsed()) {
            return cmd_regret(trace_path, config_path, intervals, seed);
        }
        return cmd_validate(config_path);
    } catch (const InvalidArgument& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitConfig;
    } catch (const OracleContractError& err) {
        std::cerr << "oracle contract violation: " << err.what() << '\n';
        return kExitOracle;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
}
