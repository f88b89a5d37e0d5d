#include "delmdp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "delmdp/io.hpp"

namespace delmdp {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return out;
}

}  // namespace

double pseudo_regret(const std::vector<std::uint64_t>& pair_counts, const GapTable& gaps) {
    if (pair_counts.size() != gaps.delta.size())
        throw std::invalid_argument("pseudo_regret: table size mismatch");
    double s = 0.0;
    for (std::size_t p = 0; p < pair_counts.size(); ++p)
        s += static_cast<double>(pair_counts[p]) * gaps.delta[p];
    return s;
}

RegretTrace run_episode(const Mdp& mdp, const StructureSpec& structure,
                        AgentConfig agent_cfg, std::uint64_t T, std::uint64_t seed,
                        std::uint64_t record_every, const StepHook& hook) {
    agent_cfg.structure = structure;
    DelAgent agent(mdp.num_states, mdp.num_actions, agent_cfg, 0, mdp.state_embedding,
                   mdp.action_embedding);
    std::uint64_t traj_seed = splitmix64(seed ^ 0x6e6f6973655f5452ULL);
    return run_episode_with(mdp, agent, T, traj_seed, record_every, hook);
}

namespace {

Mdp experiment_mdp(const ExperimentConfig& cfg, std::uint64_t run_seed,
                   StructureSpec* out_structure) {
    if (cfg.two_cluster.has_value()) {
        TwoClusterParams params = *cfg.two_cluster;
        params.seed = run_seed;  // embeddings are re-randomized per run
        auto inst = make_two_cluster(params);
        if (out_structure && out_structure->kind == StructureKind::Lipschitz) {
            // unset constants fall back to the generator's canonical ones
            if (std::isnan(out_structure->L)) out_structure->L = inst.structure.L;
            if (std::isnan(out_structure->L_prime))
                out_structure->L_prime = inst.structure.L_prime;
        }
        return std::move(inst.mdp);
    }
    if (!cfg.mdp_file.empty()) {
        if (out_structure && out_structure->kind == StructureKind::Lipschitz &&
            (std::isnan(out_structure->L) || std::isnan(out_structure->L_prime)))
            throw std::invalid_argument(
                "Lipschitz agents on file environments need explicit L and L_prime");
        return load_mdp(cfg.mdp_file);
    }
    throw std::invalid_argument("experiment config names no environment");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.agents.empty()) throw std::invalid_argument("experiment needs >= 1 agent");
    if (cfg.seeds.empty()) throw std::invalid_argument("experiment needs >= 1 seed");

    struct Job {
        std::size_t agent_idx;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t ai = 0; ai < cfg.agents.size(); ++ai)
        for (std::uint64_t seed : cfg.seeds) jobs.push_back({ai, seed});

    ExperimentResult result;
    result.runs.resize(jobs.size());
    result.code_version = kVersion;
    {
        nlohmann::json echo;
        if (cfg.two_cluster) {
            echo["env"] = {{"type", "two_cluster"},
                           {"num_states", cfg.two_cluster->num_states},
                           {"epsilon", cfg.two_cluster->epsilon},
                           {"zeta_embed", cfg.two_cluster->zeta_embed}};
        } else {
            echo["env"] = {{"type", "mdp_file"}, {"path", cfg.mdp_file}};
        }
        echo["horizon"] = cfg.horizon;
        echo["seeds"] = cfg.seeds;
        echo["record_every"] = cfg.record_every;
        nlohmann::json agents = nlohmann::json::array();
        for (const auto& spec : cfg.agents) {
            nlohmann::json a;
            a["name"] = spec.name;
            a["mode"] = spec.config.mode == DelMode::Full ? "full" : "simplified";
            a["gamma"] = spec.config.gamma;
            a["structure"] = spec.config.structure.kind == StructureKind::Lipschitz
                                 ? "lipschitz"
                                 : "unstructured";
            if (spec.config.structure.kind == StructureKind::Lipschitz) {
                a["L"] = spec.config.structure.L;
                a["L_prime"] = spec.config.structure.L_prime;
                a["alpha"] = spec.config.structure.alpha;
                a["alpha_prime"] = spec.config.structure.alpha_prime;
            }
            agents.push_back(std::move(a));
        }
        echo["agents"] = std::move(agents);
        echo["code_version"] = kVersion;
        result.config_echo = echo.dump(1);
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            const AgentSpec& spec = cfg.agents[job.agent_idx];
            RunResult& rr = result.runs[i];
            rr.agent = spec.name;
            rr.seed = job.seed;
            try {
                StructureSpec structure = spec.config.structure;
                Mdp mdp = experiment_mdp(cfg, job.seed, &structure);
                rr.trace = run_episode(mdp, structure, spec.config, cfg.horizon, job.seed,
                                       cfg.record_every);
            } catch (const std::exception& e) {
                rr.trace.failed = true;
                rr.trace.error = e.what();
            }
        }
    };

    std::size_t n_threads = cfg.threads ? cfg.threads
                                        : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i + 1 < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (const AgentSpec& spec : cfg.agents) {
        AgentSummary sum;
        sum.agent = spec.name;
        std::vector<double> finals, realized;
        for (const RunResult& rr : result.runs) {
            if (rr.agent != spec.name) continue;
            if (rr.trace.failed || rr.trace.points.empty()) {
                sum.failed += 1;
                continue;
            }
            finals.push_back(rr.trace.final_point().pseudo_regret);
            realized.push_back(rr.trace.final_point().realized_regret);
        }
        sum.completed = finals.size();
        if (!finals.empty()) {
            double mu = 0.0;
            for (double v : finals) mu += v;
            mu /= static_cast<double>(finals.size());
            double var = 0.0;
            for (double v : finals) var += (v - mu) * (v - mu);
            var /= static_cast<double>(finals.size());  // population convention
            sum.mean_final_pseudo_regret = mu;
            sum.std_final_pseudo_regret = std::sqrt(var);
            double mur = 0.0;
            for (double v : realized) mur += v;
            sum.mean_final_realized_regret = mur / static_cast<double>(realized.size());
        }
        result.summaries.push_back(std::move(sum));
    }

    if (!cfg.output_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.output_dir);
        std::ofstream meta(cfg.output_dir + "/experiment_meta.json");
        meta << result.config_echo << "\n";
        for (const RunResult& rr : result.runs) {
            if (rr.trace.failed) continue;
            std::string path = cfg.output_dir + "/trace_" + sanitize(rr.agent) + "_seed" +
                               std::to_string(rr.seed) + ".csv";
            write_trace_csv(rr.trace, path);
        }
        // aggregated regret-over-time curves (shared record grid)
        std::ofstream ts(cfg.output_dir + "/timeseries.csv");
        ts << "t,agent,mean_pseudo_regret,std_pseudo_regret\n";
        char buf[160];
        for (const AgentSpec& spec : cfg.agents) {
            std::vector<const RegretTrace*> traces;
            for (const RunResult& rr : result.runs)
                if (rr.agent == spec.name && !rr.trace.failed && !rr.trace.points.empty())
                    traces.push_back(&rr.trace);
            if (traces.empty()) continue;
            std::size_t npts = traces.front()->points.size();
            for (std::size_t k = 0; k < npts; ++k) {
                double mu = 0.0;
                for (auto* tr : traces) mu += tr->points[k].pseudo_regret;
                mu /= static_cast<double>(traces.size());
                double var = 0.0;
                for (auto* tr : traces) {
                    double d = tr->points[k].pseudo_regret - mu;
                    var += d * d;
                }
                var /= static_cast<double>(traces.size());
                std::snprintf(buf, sizeof buf, "%llu,%s,%.10g,%.10g\n",
                              static_cast<unsigned long long>(traces.front()->points[k].t),
                              spec.name.c_str(), mu, std::sqrt(var));
                ts << buf;
            }
        }
    }
    return result;
}

std::vector<SweepRow> sweep_sizes(const ExperimentConfig& base,
                                  const std::vector<std::size_t>& sizes) {
    if (!base.two_cluster.has_value())
        throw std::invalid_argument("sweep_sizes requires a two-cluster environment");
    std::vector<SweepRow> rows;
    for (std::size_t S : sizes) {
        ExperimentConfig cfg = base;
        cfg.two_cluster->num_states = S;
        if (!base.output_dir.empty())
            cfg.output_dir = base.output_dir + "/S" + std::to_string(S);
        ExperimentResult res = run_experiment(cfg);
        for (const AgentSummary& sum : res.summaries)
            rows.push_back(
                {S, sum.agent, sum.mean_final_pseudo_regret, sum.std_final_pseudo_regret});
    }
    return rows;
}

void write_trace_csv(const RegretTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,cum_reward,pseudo_regret,realized_regret,n_mnt,n_est,n_xpt,n_xpr\n";
    char buf[240];
    for (const TracePoint& p : trace.points) {
        std::snprintf(buf, sizeof buf, "%llu,%.10g,%.10g,%.10g,%llu,%llu,%llu,%llu\n",
                      static_cast<unsigned long long>(p.t), p.cum_reward, p.pseudo_regret,
                      p.realized_regret,
                      static_cast<unsigned long long>(p.phase_counts[0]),
                      static_cast<unsigned long long>(p.phase_counts[1]),
                      static_cast<unsigned long long>(p.phase_counts[2]),
                      static_cast<unsigned long long>(p.phase_counts[3]));
        out << buf;
    }
}

void write_summary_csv(const std::vector<SweepRow>& rows, std::uint64_t horizon,
                       std::size_t num_seeds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "S,agent,T,seeds,mean_final_pseudo_regret,std_final_pseudo_regret\n";
    char buf[240];
    for (const SweepRow& row : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%s,%llu,%zu,%.10g,%.10g\n", row.num_states,
                      row.agent.c_str(), static_cast<unsigned long long>(horizon), num_seeds,
                      row.mean_final_pseudo_regret, row.std_final_pseudo_regret);
        out << buf;
    }
}

}  // namespace delmdp
