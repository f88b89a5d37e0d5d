#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "delmdp/del.hpp"
#include "delmdp/envs.hpp"
#include "delmdp/mdp.hpp"

namespace delmdp {

/// One recorded point of an episode. Phase counts are cumulative, ordered
/// monotonize / estimate / exploit / explore.
struct TracePoint {
    std::uint64_t t = 0;
    double cum_reward = 0.0;
    double pseudo_regret = 0.0;    // sum N_t(x,a) delta*(x,a)
    double realized_regret = 0.0;  // t g* - cum_reward
    std::array<std::uint64_t, 4> phase_counts{};
};

struct RegretTrace {
    std::vector<TracePoint> points;
    std::uint64_t horizon = 0;
    double gain_star = 0.0;
    bool failed = false;
    std::string error;

    const TracePoint& final_point() const { return points.back(); }
};

/// Per-step trace hook: (t, x, a, phase, r, y).
using StepHook =
    std::function<void(std::uint64_t, State, Action, Phase, double, State)>;

/// sum over pairs of N(x,a) * delta(x,a).
double pseudo_regret(const std::vector<std::uint64_t>& pair_counts, const GapTable& gaps);

/// Simulates T steps of any agent exposing select_action/observe against the
/// true MDP, measuring regret against the precomputed optimal solution.
/// Starts at state 0; deterministic given (mdp, T, seed).
template <typename Agent>
RegretTrace run_episode_with(const Mdp& mdp, Agent& agent, std::uint64_t T,
                             std::uint64_t seed, std::uint64_t record_every = 100,
                             const StepHook& hook = {}) {
    OptimalSolution sol = solve_optimal(mdp, 0);
    GapTable gaps = delta_star(mdp, sol);

    RegretTrace trace;
    trace.horizon = T;
    trace.gain_star = sol.gain_bias.gain;
    if (record_every == 0) record_every = 1;

    Rng rng(seed);
    State x = 0;
    double cum_reward = 0.0, pr = 0.0;
    std::array<std::uint64_t, 4> phases{};
    for (std::uint64_t t = 1; t <= T; ++t) {
        auto decision = agent.select_action(x);
        Transition tr = sample_step(mdp, x, decision.action, rng);
        agent.observe(tr);
        cum_reward += tr.r;
        pr += gaps.at(x, decision.action);
        phases[static_cast<std::size_t>(decision.phase)] += 1;
        if (hook) hook(t, x, decision.action, decision.phase, tr.r, tr.y);
        x = tr.y;
        if (t % record_every == 0 || t == T) {
            trace.points.push_back({t, cum_reward, pr,
                                    static_cast<double>(t) * sol.gain_bias.gain - cum_reward,
                                    phases});
        }
    }
    if (T == 0) trace.points.push_back({0, 0.0, 0.0, 0.0, {}});
    return trace;
}

/// DEL-specific wrapper; embeddings are forwarded from the true MDP so the
/// Lipschitz constraint weights are available to the agent.
RegretTrace run_episode(const Mdp& mdp, const StructureSpec& structure,
                        AgentConfig agent_cfg, std::uint64_t T, std::uint64_t seed,
                        std::uint64_t record_every = 100, const StepHook& hook = {});

struct AgentSpec {
    std::string name;
    AgentConfig config;
};

struct ExperimentConfig {
    std::optional<TwoClusterParams> two_cluster;  // exactly one env source set
    std::string mdp_file;
    std::vector<AgentSpec> agents;
    std::uint64_t horizon = 0;
    std::vector<std::uint64_t> seeds;
    std::string output_dir;
    std::uint64_t record_every = 100;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

struct RunResult {
    std::string agent;
    std::uint64_t seed = 0;
    RegretTrace trace;
};

struct AgentSummary {
    std::string agent;
    std::size_t completed = 0;
    std::size_t failed = 0;
    double mean_final_pseudo_regret = 0.0;
    double std_final_pseudo_regret = 0.0;  // population convention
    double mean_final_realized_regret = 0.0;
};

struct ExperimentResult {
    std::vector<RunResult> runs;
    std::vector<AgentSummary> summaries;
    std::string config_echo;   // JSON echo of the effective configuration
    std::string code_version;  // library version the runs were produced with
};

inline constexpr const char* kVersion = "0.1.0";

/// Runs every (agent, seed) pair, concurrently across runs, and aggregates
/// final-regret statistics. When output_dir is nonempty, writes one trace
/// CSV per run plus a summary CSV.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
    std::size_t num_states = 0;
    std::string agent;
    double mean_final_pseudo_regret = 0.0;
    double std_final_pseudo_regret = 0.0;
};

/// Re-runs the experiment for each state-space size (two-cluster envs only)
/// and emits the size/agent regret table.
std::vector<SweepRow> sweep_sizes(const ExperimentConfig& base,
                                  const std::vector<std::size_t>& sizes);

void write_trace_csv(const RegretTrace& trace, const std::string& path);
void write_summary_csv(const std::vector<SweepRow>& rows, std::uint64_t horizon,
                       std::size_t num_seeds, const std::string& path);

/// Renders a trace or summary CSV as a deterministic SVG plot with
/// one-standard-deviation bands, plus a gnuplot-compatible .dat file.
void emit_plot(const std::string& csv_path, const std::string& out_path);

}  // namespace delmdp
