#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "delmdp/harness.hpp"
#include "delmdp/io.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace delmdp;
using fixtures::kGo;
using fixtures::kStay;

namespace {

// Test-only baseline agents sharing the DelAgent step interface.
struct FixedPolicyAgent {
    Policy policy;
    struct Decision {
        Action action;
        Phase phase;
    };
    Decision select_action(State x) { return {policy.action_of[x], Phase::Exploit}; }
    void observe(const Transition&) {}
};

struct UniformAgent {
    std::size_t num_actions;
    Rng rng;
    struct Decision {
        Action action;
        Phase phase;
    };
    Decision select_action(State) {
        auto a = static_cast<Action>(uniform01(rng) * static_cast<double>(num_actions));
        return {std::min<Action>(a, num_actions - 1), Phase::Explore};
    }
    void observe(const Transition&) {}
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("delmdp_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("pseudo_regret: M2 count-weighted sum") {
    Mdp m2 = fixtures::make_m2();
    auto gaps = delta_star(m2, solve_optimal(m2, 0));
    std::vector<std::uint64_t> counts(4, 0);
    counts[0 * 2 + kStay] = 5;
    counts[1 * 2 + kGo] = 2;
    CHECK(pseudo_regret(counts, gaps) == doctest::Approx(7.6).epsilon(1e-10));
    std::vector<std::uint64_t> zeros(4, 0);
    CHECK(pseudo_regret(zeros, gaps) == 0.0);
    std::vector<std::uint64_t> optimal_only(4, 0);
    optimal_only[0 * 2 + kGo] = 100;
    optimal_only[1 * 2 + kStay] = 50;
    CHECK(pseudo_regret(optimal_only, gaps) <= 1e-7);
}

TEST_CASE("run_episode: T = 0 gives an empty trace with zero regrets") {
    Mdp m2 = fixtures::make_m2();
    auto trace =
        run_episode(m2, StructureSpec::unstructured(), AgentConfig{DelMode::Simplified},
                    0, 1);
    REQUIRE(trace.points.size() == 1);
    CHECK(trace.points[0].t == 0);
    CHECK(trace.points[0].pseudo_regret == 0.0);
    CHECK(trace.points[0].realized_regret == 0.0);
}

TEST_CASE("oracle agent playing a fixed optimal policy has zero pseudo-regret") {
    Mdp m2 = fixtures::make_m2();
    FixedPolicyAgent agent{solve_optimal(m2, 0).optimal_policy};
    auto trace = run_episode_with(m2, agent, 5000, 3);
    CHECK(trace.final_point().pseudo_regret <= 1e-7);
}

TEST_CASE("uniform agent pseudo-regret matches the Monte-Carlo oracle within 5%") {
    Mdp m2 = fixtures::make_m2();
    auto gaps = delta_star(m2, solve_optimal(m2, 0));

    double oracle_mean = 0.0;
    const int oracle_seeds = 100;
    for (int s = 0; s < oracle_seeds; ++s)
        oracle_mean += oracle::mc_uniform_pseudo_regret(m2, gaps.delta, 10000, 1000 + s);
    oracle_mean /= oracle_seeds;

    double got_mean = 0.0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        UniformAgent agent{2, Rng(500 + s)};
        got_mean += run_episode_with(m2, agent, 10000, 77 + s).final_point().pseudo_regret;
    }
    got_mean /= seeds;
    CHECK(std::fabs(got_mean - oracle_mean) / oracle_mean <= 0.05);
}

TEST_CASE("pseudo-regret is nonnegative and nondecreasing along DEL traces") {
    Mdp m2 = fixtures::make_m2();
    auto trace = run_episode(m2, StructureSpec::unstructured(),
                             AgentConfig{DelMode::Simplified}, 4000, 11, 50);
    double prev = 0.0;
    for (const auto& pt : trace.points) {
        CHECK(pt.pseudo_regret >= prev - 1e-12);
        prev = pt.pseudo_regret;
        std::uint64_t phase_sum = 0;
        for (auto c : pt.phase_counts) phase_sum += c;
        CHECK(phase_sum == pt.t);
    }
}

TEST_CASE("run_episode is deterministic given (mdp, cfg, T, seed)") {
    auto inst = make_two_cluster({4, 0.1, 0.1, 13});
    auto a = run_episode(inst.mdp, inst.structure,
                         AgentConfig{DelMode::Simplified, 1.0, inst.structure}, 1500, 9);
    auto b = run_episode(inst.mdp, inst.structure,
                         AgentConfig{DelMode::Simplified, 1.0, inst.structure}, 1500, 9);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].cum_reward == b.points[i].cum_reward);
        CHECK(a.points[i].pseudo_regret == b.points[i].pseudo_regret);
        CHECK(a.points[i].phase_counts == b.points[i].phase_counts);
    }
}

TEST_CASE("trace hook reports every step tuple") {
    Mdp m2 = fixtures::make_m2();
    std::vector<std::uint64_t> ts;
    auto hook = [&ts](std::uint64_t t, State, Action, Phase, double, State) {
        ts.push_back(t);
    };
    run_episode(m2, StructureSpec::unstructured(), AgentConfig{DelMode::Simplified}, 50,
                1, 10, hook);
    REQUIRE(ts.size() == 50);
    CHECK(ts.front() == 1);
    CHECK(ts.back() == 50);
}

TEST_CASE("run_experiment: mean/std aggregation and failure accounting") {
    ExperimentConfig cfg;
    cfg.two_cluster = TwoClusterParams{4, 0.1, 0.1, 0};
    cfg.agents = {{"un", AgentConfig{DelMode::Simplified}}};
    cfg.horizon = 300;
    cfg.seeds = {1, 2, 3};
    cfg.record_every = 100;
    auto res = run_experiment(cfg);
    REQUIRE(res.summaries.size() == 1);
    const auto& sum = res.summaries[0];
    CHECK(sum.completed == 3);
    CHECK(sum.failed == 0);
    double lo = 1e300, hi = -1e300;
    for (const auto& rr : res.runs) {
        lo = std::min(lo, rr.trace.final_point().pseudo_regret);
        hi = std::max(hi, rr.trace.final_point().pseudo_regret);
    }
    CHECK(sum.mean_final_pseudo_regret >= lo);
    CHECK(sum.mean_final_pseudo_regret <= hi);
}

TEST_CASE("population std convention: finals 10 and 20 give mean 15, std 5") {
    std::vector<double> finals{10.0, 20.0};
    double mu = (finals[0] + finals[1]) / 2.0;
    double var = 0.0;
    for (double v : finals) var += (v - mu) * (v - mu);
    var /= finals.size();
    CHECK(mu == doctest::Approx(15.0));
    CHECK(std::sqrt(var) == doctest::Approx(5.0));
}

TEST_CASE("run_experiment writes byte-identical CSVs on replay") {
    auto dir1 = temp_dir("rep1");
    auto dir2 = temp_dir("rep2");
    ExperimentConfig cfg;
    cfg.two_cluster = TwoClusterParams{4, 0.1, 0.1, 0};
    cfg.agents = {{"un", AgentConfig{DelMode::Simplified}},
                  {"lip", AgentConfig{DelMode::Simplified, 1.0,
                                      StructureSpec::lipschitz(2.0, 2.0)}}};
    cfg.horizon = 400;
    cfg.seeds = {5, 6};
    cfg.record_every = 100;
    cfg.output_dir = dir1;
    run_experiment(cfg);
    cfg.output_dir = dir2;
    run_experiment(cfg);
    for (const char* name :
         {"trace_un_seed5.csv", "trace_lip_seed6.csv", "timeseries.csv"}) {
        auto a = slurp(dir1 + "/" + name);
        auto b = slurp(dir2 + "/" + name);
        CHECK(!a.empty());
        CHECK(a == b);
    }
}

TEST_CASE("realized and pseudo regret agree in the mean up to the span slack") {
    Mdp m2 = fixtures::make_m2();
    auto gaps = delta_star(m2, solve_optimal(m2, 0));
    const int n = 32;
    std::vector<double> diffs;
    for (int s = 0; s < n; ++s) {
        auto tr = run_episode(m2, StructureSpec::unstructured(),
                              AgentConfig{DelMode::Simplified}, 10000, 100 + s, 10000);
        diffs.push_back(tr.final_point().realized_regret -
                        tr.final_point().pseudo_regret);
    }
    double mu = 0.0;
    for (double d : diffs) mu += d;
    mu /= n;
    double var = 0.0;
    for (double d : diffs) var += (d - mu) * (d - mu);
    var /= n;
    CHECK(std::fabs(mu) <= 3.0 * std::sqrt(var / n) + gaps.span);
}

TEST_CASE("sweep_sizes: singleton size list reduces to run_experiment") {
    ExperimentConfig cfg;
    cfg.two_cluster = TwoClusterParams{4, 0.1, 0.1, 0};
    cfg.agents = {{"un", AgentConfig{DelMode::Simplified}}};
    cfg.horizon = 200;
    cfg.seeds = {1, 2};
    cfg.record_every = 100;
    auto rows = sweep_sizes(cfg, {4});
    REQUIRE(rows.size() == 1);
    auto res = run_experiment(cfg);
    CHECK(rows[0].mean_final_pseudo_regret ==
          doctest::Approx(res.summaries[0].mean_final_pseudo_regret));
    CHECK(rows[0].num_states == 4);
}

TEST_CASE("emit_plot: trace, summary, timeseries schemas and determinism") {
    auto dir = temp_dir("plot");

    // empty trace CSV: header only
    std::string empty_csv = dir + "/empty.csv";
    {
        std::ofstream out(empty_csv);
        out << "t,cum_reward,pseudo_regret,realized_regret,n_mnt,n_est,n_xpt,n_xpr\n";
    }
    std::string empty_svg = dir + "/empty.svg";
    emit_plot(empty_csv, empty_svg);
    CHECK(slurp(empty_svg).find("<svg") != std::string::npos);

    // two-agent summary CSV with bands
    std::string sum_csv = dir + "/summary.csv";
    {
        std::vector<SweepRow> rows{{4, "un", 100.0, 10.0},
                                   {8, "un", 220.0, 14.0},
                                   {4, "lip", 80.0, 9.0},
                                   {8, "lip", 90.0, 12.0}};
        write_summary_csv(rows, 1000, 4, sum_csv);
    }
    std::string sum_svg = dir + "/summary.svg";
    emit_plot(sum_csv, sum_svg);
    auto svg1 = slurp(sum_svg);
    CHECK(svg1.find("polyline") != std::string::npos);
    CHECK(svg1.find("polygon") != std::string::npos);  // std bands
    CHECK(svg1.find("un") != std::string::npos);
    emit_plot(sum_csv, sum_svg);
    CHECK(slurp(sum_svg) == svg1);  // byte-identical re-run
    CHECK(!slurp(sum_svg + ".dat").empty());

    // real trace CSV round trip through the plotter
    Mdp m2 = fixtures::make_m2();
    auto trace = run_episode(m2, StructureSpec::unstructured(),
                             AgentConfig{DelMode::Simplified}, 500, 4, 100);
    std::string trace_csv = dir + "/trace.csv";
    write_trace_csv(trace, trace_csv);
    emit_plot(trace_csv, dir + "/trace.svg");
    CHECK(slurp(dir + "/trace.svg").find("pseudo_regret") != std::string::npos);

    // schema mismatch diagnostics
    std::string bad_csv = dir + "/bad.csv";
    {
        std::ofstream out(bad_csv);
        out << "a,b\n1,2\n";
    }
    CHECK_THROWS_AS(emit_plot(bad_csv, dir + "/bad.svg"), FileFormatError);
}
