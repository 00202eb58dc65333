#include "pfoco/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace pfoco;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v(i++) = x;
    }
    return v;
}

Json minimal_config() {
    return Json::parse(R"({
        "set": {"kind": "ball", "dimension": 2, "radius": 1.0},
        "losses": {"kind": "random_linear", "scale": 1.0},
        "learner": "so_ogd",
        "T": 100,
        "seeds": [1]
    })");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Brute-force interval minimum of summed linear losses over a ball of radius R.
double ball_linear_minimum(const LossSchedule& s, const Interval& iv, double R) {
    Vector sum = Vector::Zero(static_cast<Eigen::Index>(s.dimension()));
    for (std::size_t t = iv.first; t <= iv.last; ++t) {
        sum += s.at(t).linear_term();
    }
    return -R * sum.norm();
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("pfoco_harness_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Config, MinimalConfigParses) {
    const ExperimentConfig cfg = parse_config_json(minimal_config());
    EXPECT_EQ(cfg.learner, LearnerKind::SoOgd);
    EXPECT_EQ(cfg.T, 100u);
    ASSERT_EQ(cfg.seeds.size(), 1u);
    EXPECT_EQ(cfg.seeds.front(), 1u);
    EXPECT_EQ(cfg.policy, IntervalPolicy::Geometric);
    const PreparedRun run = prepare_run(cfg, 1);
    EXPECT_EQ(run.set->dimension(), 2u);
    EXPECT_EQ(run.schedule.horizon(), 100u);
}

TEST(Config, TooLargeCPrimeNamesTheInequality) {
    Json j = minimal_config();
    j["learner"] = "so_bgd";
    j["T"] = 10000;
    j["constants"] = {{"c", 1.0}, {"c_prime", 6.0}};
    try {
        parse_config_json(j);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("2c'T^{-1/4} < r"), std::string::npos) << e.what();
    }
}

TEST(Config, UnknownKeyRejected) {
    Json j = minimal_config();
    j["learning_rate"] = 0.1;
    try {
        parse_config_json(j);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("learning_rate"), std::string::npos) << e.what();
    }
}

TEST(Config, RangeAndPreconditionErrors) {
    Json j = minimal_config();
    j["T"] = 0;
    EXPECT_THROW(parse_config_json(j), ConfigError);
    j = minimal_config();
    j["learner"] = "sgd";
    EXPECT_THROW(parse_config_json(j), ConfigError);
    j = minimal_config();
    j["set"] = {{"kind", "simplex"}, {"dimension", 3}};
    EXPECT_THROW(parse_config_json(j), ConfigError);
    j = minimal_config();
    j["learner"] = "loo_bogd_sc";
    j["losses"] = {{"kind", "random_quadratic"}, {"alpha", 1.0}, {"center_radius", 0.1}};
    j["T"] = 10;
    try {
        parse_config_json(j);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("T >= 27(alpha R/G_f)^2"), std::string::npos) << e.what();
    }
    j = minimal_config();
    j["constants"] = {{"alpha", 1.0}};
    EXPECT_THROW(parse_config_json(j), ConfigError);
    j = minimal_config();
    j["set"]["dimension"] = -1;
    EXPECT_THROW(parse_config_json(j), ConfigError);
    j = minimal_config();
    j["intervals"] = {{"extra", {{5, 200}}}};
    EXPECT_THROW(parse_config_json(j), ConfigError);
    EXPECT_THROW(parse_config("/nonexistent/config.json"), ConfigError);
}

TEST(StaticRegret, ZeroLosses) {
    const auto ball = std::make_shared<const Ball>(2, 1.0);
    const LossSchedule s = make_zero_schedule(10, 2, 1.0);
    const IntervalRegret r = static_regret(std::vector<double>(10, 0.0), s, ball, 1e-12);
    EXPECT_EQ(r.regret, 0.0);
}

TEST(StaticRegret, LinearClosedFormComparator) {
    const auto ball = std::make_shared<const Ball>(2, 1.0);
    const LossSchedule s(std::vector<Loss>(10, Loss::linear(vec({1, 0}))), 1.0);
    const IntervalRegret r = static_regret(std::vector<double>(10, 0.0), s, ball, 1e-8);
    EXPECT_NEAR((r.comparator - vec({-1, 0})).norm(), 0.0, 1e-15);
    EXPECT_NEAR(r.comparator_value, -10.0, 1e-12);
    EXPECT_NEAR(r.regret, 10.0, 1e-12);
    EXPECT_EQ(r.certificate, "closed-form");
}

TEST(StaticRegret, QuadraticPinnedAtCommonOptimum) {
    const auto box = std::make_shared<const Box>(Box::cube(3, 1.0));
    const Vector target = vec({0.2, -0.3, 0.5});
    const LossSchedule s = make_switching_schedule(50, {{50, target}}, LossKind::Quadratic, 1, box->outer_radius());
    std::vector<double> played;
    for (std::size_t t = 1; t <= 50; ++t) {
        played.push_back(s.at(t).value(target));
    }
    const IntervalRegret r = static_regret(played, s, box, 1e-10);
    EXPECT_NEAR(r.regret, 0.0, 1e-10);
    EXPECT_LE(r.certificate_gap, 1e-10);
}

TEST(StaticRegret, CertifiedComparatorOnPolytope) {
    Eigen::MatrixXd A(5, 2);
    A << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1;
    const auto poly = std::make_shared<const Polytope>(A, vec({1, 1, 1, 1, 1.5}));
    const LossSchedule s = make_random_quadratic_schedule(40, 2, 1.0, 2.0, poly->outer_radius(), 3);
    const double tol = 1e-8;
    const IntervalRegret r = static_regret(std::vector<double>(40, 0.0), s, poly, tol);
    EXPECT_LE(r.certificate_gap, tol);
    EXPECT_TRUE(poly->contains(r.comparator, 1e-9));
    // Grid oracle: no feasible grid point beats the comparator by more than the tolerance.
    double sum_at_comparator = 0.0;
    for (std::size_t t = 1; t <= 40; ++t) {
        sum_at_comparator += s.at(t).value(r.comparator);
    }
    EXPECT_NEAR(sum_at_comparator, r.comparator_value, 1e-9);
    for (int i = -100; i <= 100; ++i) {
        for (int k = -100; k <= 100; ++k) {
            const Vector x = vec({i / 100.0, k / 100.0});
            if (!poly->contains(x)) {
                continue;
            }
            double v = 0.0;
            for (std::size_t t = 1; t <= 40; ++t) {
                v += s.at(t).value(x);
            }
            EXPECT_GE(v, r.comparator_value - tol - 1e-9);
        }
    }
}

TEST(AdaptiveRegret, SwitchingHalvesAreReported) {
    const auto ball = std::make_shared<const Ball>(2, 1.0);
    const Vector e1 = vec({1, 0});
    const std::size_t T = 200;
    const LossSchedule s = make_switching_schedule(T, {{100, e1}, {100, -e1}}, LossKind::Linear, 5, 1.0);
    const std::vector<double> played(T, 0.0);
    const auto intervals = make_intervals(IntervalPolicy::Geometric, T, s.segments());
    const AdaptiveRegretReport rep = adaptive_regret(played, s, ball, intervals, 1e-8, "geometric");
    const IntervalRegret* first = rep.find({1, 100});
    const IntervalRegret* second = rep.find({101, 200});
    const IntervalRegret* whole = rep.find({1, 200});
    ASSERT_NE(first, nullptr);
    ASSERT_NE(second, nullptr);
    ASSERT_NE(whole, nullptr);
    EXPECT_NEAR(first->regret, -ball_linear_minimum(s, {1, 100}, 1.0), 1e-9);
    EXPECT_NEAR(second->regret, -ball_linear_minimum(s, {101, 200}, 1.0), 1e-9);
    EXPECT_GT(first->regret, 10.0 * std::abs(whole->regret));
    EXPECT_GE(rep.max_regret, first->regret);
}

TEST(AdaptiveRegret, SinglePolicyEqualsStatic) {
    const auto set = std::make_shared<const L1Ball>(3, 1.0);
    const LossSchedule s = make_random_linear_schedule(64, 3, 1.0, 1.0, 2);
    std::vector<double> played;
    for (std::size_t t = 1; t <= 64; ++t) {
        played.push_back(s.at(t).value(Vector::Zero(3)));
    }
    const auto rep = adaptive_regret(played, s, set, make_intervals(IntervalPolicy::Single, 64), 1e-8, "single");
    ASSERT_EQ(rep.intervals.size(), 1u);
    EXPECT_EQ(rep.max_regret, static_regret(played, s, set, 1e-8).regret);
}

TEST(AdaptiveRegret, MatchesBruteForceOnEveryInterval) {
    const auto ball = std::make_shared<const Ball>(3, 1.0);
    const std::size_t T = 40;
    const LossSchedule s = make_random_linear_schedule(T, 3, 1.0, 1.0, 4);
    Rng rng(5);
    std::vector<double> played;
    for (std::size_t t = 1; t <= T; ++t) {
        played.push_back(s.at(t).value(sample_unit_ball(rng, 3)));
    }
    const auto rep = adaptive_regret(played, s, ball, make_intervals(IntervalPolicy::Exhaustive, T), 1e-8);
    EXPECT_EQ(rep.intervals.size(), T * (T + 1) / 2);
    double best = -1e300;
    for (const IntervalRegret& ir : rep.intervals) {
        double sum = 0.0;
        for (std::size_t t = ir.interval.first; t <= ir.interval.last; ++t) {
            sum += played[t - 1];
        }
        const double expected = sum - ball_linear_minimum(s, ir.interval, 1.0);
        EXPECT_NEAR(ir.regret, expected, 1e-9);
        best = std::max(best, expected);
    }
    EXPECT_NEAR(rep.max_regret, best, 1e-9);
}

TEST(AdaptiveRegret, GeometricFamilyIsSubsetOfExhaustive) {
    const auto ball = std::make_shared<const Ball>(2, 1.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t T = 64;
        const LossSchedule s = make_random_linear_schedule(T, 2, 1.0, 1.0, seed);
        const LearnerParams params = loo_bogd_params(1.0, 1.0, T);
        const RunTrace tr = loo_bogd_run(*ball, s, params);
        const auto geo = adaptive_regret(tr.loss, s, ball, make_intervals(IntervalPolicy::Geometric, T), 1e-8);
        const auto all = adaptive_regret(tr.loss, s, ball, make_intervals(IntervalPolicy::Exhaustive, T), 1e-8);
        EXPECT_LE(geo.max_regret, all.max_regret + 1e-12);
        for (const IntervalRegret& ir : geo.intervals) {
            const IntervalRegret* same = all.find(ir.interval);
            ASSERT_NE(same, nullptr);
            EXPECT_EQ(same->regret, ir.regret);
        }
    }
}

TEST(Intervals, GeometricFamilyShape) {
    const auto iv = make_intervals(IntervalPolicy::Geometric, 64);
    // Lengths 64, 32, 16, 8 with strides 16, 8, 4, 2 give (64 - L) / stride + 1 starts each.
    std::size_t n64 = 0, n32 = 0, n16 = 0, n8 = 0;
    for (const Interval& i : iv) {
        EXPECT_GE(i.length(), 8u);
        n64 += i.length() == 64;
        n32 += i.length() == 32;
        n16 += i.length() == 16;
        n8 += i.length() == 8;
    }
    EXPECT_EQ(n64, 1u);
    EXPECT_EQ(n32, 5u);
    EXPECT_EQ(n16, 13u);
    EXPECT_EQ(n8, 29u);
    EXPECT_EQ(make_intervals(IntervalPolicy::Geometric, 5).size(), 1u);
    EXPECT_THROW(make_intervals(IntervalPolicy::Exhaustive, kExhaustiveLimit + 1), InvalidArgument);
    EXPECT_THROW(make_intervals(IntervalPolicy::Single, 10, {}, {{3, 11}}), InvalidArgument);
}

TEST(AdaptiveRegret, NonsmoothIntervalsAreSkippedAndFlagged) {
    const auto ball = std::make_shared<const Ball>(2, 1.0);
    const LossSchedule s = make_switching_schedule(16, {{16, vec({0.5, 0})}}, LossKind::AbsoluteDeviation, 1, 1.0);
    const auto rep = adaptive_regret(std::vector<double>(16, 0.0), s, ball, make_intervals(IntervalPolicy::Single, 16),
                                     1e-8);
    EXPECT_TRUE(rep.intervals.empty());
    ASSERT_EQ(rep.skipped.size(), 1u);
    EXPECT_FALSE(rep.skipped.front().reason.empty());
}

TEST(TraceCsv, LinesRoundTripAndMonotoneCounters) {
    const auto ball = std::make_shared<const Ball>(3, 1.0);
    const LossSchedule s3 = make_random_linear_schedule(3, 3, 1.0, 1.0, 1);
    const RunTrace small = so_ogd_run(*ball, s3, so_ogd_params(problem_constants(*ball, s3), 3, 1.0));
    const std::string text = trace_csv(small);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_EQ(text.substr(0, text.find('\n')), kTraceHeader);

    const LossSchedule s = make_random_linear_schedule(300, 3, 1.0, 1.0, 2);
    LearnerParams p = loo_bogd_params(1.0, 1.0, 300);
    p.eps = {1e-3};
    p.eta = {0.1};
    p.K = 5;
    p.blocks = 60;
    p.full_blocks = 60;
    const RunTrace tr = loo_bogd_run(*ball, s, p);
    const TraceTable back = parse_trace_csv(trace_csv(tr));
    ASSERT_EQ(back.rows(), tr.horizon());
    for (std::size_t i = 0; i < back.rows(); ++i) {
        EXPECT_EQ(back.t[i], i + 1);
        EXPECT_EQ(back.x[i], tr.played[i]);
        EXPECT_EQ(back.loss[i], tr.loss[i]);
        EXPECT_EQ(back.block_index[i], tr.block_index[i]);
        if (i > 0) {
            EXPECT_GE(back.loo_calls_cum[i], back.loo_calls_cum[i - 1]);
            EXPECT_GE(back.so_calls_cum[i], back.so_calls_cum[i - 1]);
        }
    }
    EXPECT_GT(back.loo_calls_cum.back(), 0u);
}

TEST(TraceCsv, MalformedInputRejected) {
    EXPECT_THROW(parse_trace_csv("t,x\n"), InvalidArgument);
    const std::string header = std::string(kTraceHeader) + "\n";
    EXPECT_THROW(parse_trace_csv(header + "1,0;0,0,0,0\n"), InvalidArgument);
    EXPECT_THROW(parse_trace_csv(header + "2,0;0,0,0,0,1\n"), InvalidArgument);
    EXPECT_THROW(parse_trace_csv(header + "1,0;0,0,0,0,1\n2,0,0,0,0,1\n"), InvalidArgument);
    EXPECT_THROW(parse_trace_csv(header + "1,0;abc,0,0,0,1\n"), InvalidArgument);
    EXPECT_EQ(parse_trace_csv(header + "1,0.5;-1,2,3,4,1\n").rows(), 1u);
}

TEST(Experiment, SameSeedGivesByteIdenticalTraces) {
    Json j = minimal_config();
    j["learner"] = "so_bgd";
    j["T"] = 2000;
    j["constants"] = {{"c", 2.0}, {"c_prime", 1.0}};
    j["seeds"] = {4, 5};
    const ExperimentConfig cfg = parse_config_json(j);
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    run_experiment(cfg, a.string());
    run_experiment(cfg, b.string());
    for (std::uint64_t seed : cfg.seeds) {
        const std::string name = run_stem(cfg, seed) + ".csv";
        const std::string ta = slurp(a / name);
        EXPECT_FALSE(ta.empty());
        EXPECT_EQ(ta, slurp(b / name));
    }
    EXPECT_NE(slurp(a / (run_stem(cfg, 4) + ".csv")), slurp(a / (run_stem(cfg, 5) + ".csv")));
    EXPECT_TRUE(std::filesystem::exists(a / "summary.json"));
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST(Experiment, TwentySeedSummaryReportsMeanAndStderr) {
    Json j = minimal_config();
    j["learner"] = "loo_bbgd";
    j["T"] = 1000;
    j["constants"] = {{"c", 2.0}};
    Json seeds = Json::array();
    for (int s = 0; s < 20; ++s) {
        seeds.push_back(s);
    }
    j["seeds"] = seeds;
    const ExperimentConfig cfg = parse_config_json(j);
    const auto dir = scratch("twenty");
    const std::vector<SeedOutcome> outs = run_experiment(cfg, dir.string());
    ASSERT_EQ(outs.size(), 20u);
    std::vector<double> headline;
    for (const SeedOutcome& o : outs) {
        headline.push_back(*headline_regret(o));
    }
    // Independent two-pass oracle for the mean and standard error.
    double mean = 0.0;
    for (double h : headline) {
        mean += h / 20.0;
    }
    double ss = 0.0;
    for (double h : headline) {
        ss += (h - mean) * (h - mean);
    }
    const double se = std::sqrt(ss / 19.0 / 20.0);
    std::ifstream in(dir / "summary.json");
    const Json summary = Json::parse(in);
    EXPECT_NEAR(summary.at("regret_mean").get<double>(), mean, 1e-9 * (1.0 + std::abs(mean)));
    EXPECT_NEAR(summary.at("regret_stderr").get<double>(), se, 1e-9 * (1.0 + se));
    EXPECT_GT(summary.at("regret_stderr").get<double>(), 0.0);
    EXPECT_EQ(summary.at("runs").size(), 20u);
    EXPECT_EQ(summary.at("regret_kind").get<std::string>(), "expected adaptive");
    std::filesystem::remove_all(dir);
}

TEST(Experiment, SummaryFlagsBudgetViolationFromFaultyOracle) {
    const auto ball = std::make_shared<const Ball>(2, 1.0);
    const LossSchedule s = make_random_linear_schedule(20, 2, 1.0, 1.0, 1);
    int calls = 0;
    const IpOracle faulty = [&](const Vector& y, OracleCounters& c) {
        CipResult r;
        r.projection = clip_to_ball(y, 1.0);
        r.iteration_budget = 1.0;
        r.iterations = ++calls == 7 ? 5 : 1;
        c.so_calls += r.iterations;
        r.so_calls = r.iterations;
        return r;
    };
    SeedOutcome o;
    o.params = so_ogd_params(problem_constants(*ball, s), 20, 1.0);
    o.bounds = theory_bounds(o.params);
    o.trace = ogd_wf_run(*ball, s, [](std::size_t) { return 0.1; }, faulty, Vector::Zero(2));
    o.regret = adaptive_regret(o.trace.loss, s, ball, make_intervals(IntervalPolicy::Single, 20), 1e-8);
    const Json j = seed_summary_json(o);
    EXPECT_EQ(j.at("totals").at("budget_violations").get<std::size_t>(), 1u);
    EXPECT_EQ(j.at("totals").at("so_calls").get<std::uint64_t>(), 24u);
}

TEST(Experiment, StaticHeadlineUsesFullHorizon) {
    Json j = minimal_config();
    j["learner"] = "loo_bogd_sc";
    j["T"] = 500;
    j["losses"] = {{"kind", "random_quadratic"}, {"alpha", 1.0}, {"center_radius", 0.2}};
    const ExperimentConfig cfg = parse_config_json(j);
    const SeedOutcome o = run_seed(cfg, 3);
    ASSERT_TRUE(o.full_horizon.has_value());
    EXPECT_EQ(o.bounds.regret_kind, "static");
    EXPECT_EQ(*headline_regret(o), o.full_horizon->regret);
    EXPECT_LE(o.full_horizon->regret, o.bounds.regret);
}

TEST(Experiment, MeanAndStderrEdgeCases) {
    EXPECT_EQ(mean_and_stderr({}), std::make_pair(0.0, 0.0));
    EXPECT_EQ(mean_and_stderr({3.0}), std::make_pair(3.0, 0.0));
    const auto [m, se] = mean_and_stderr({1.0, 3.0});
    EXPECT_DOUBLE_EQ(m, 2.0);
    EXPECT_DOUBLE_EQ(se, 1.0);
}
