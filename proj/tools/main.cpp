// delmdp command line: planning, regret lower bounds, DEL experiments.
//
// Exit codes: 0 success, 1 usage/schema errors, 2 validation failures,
// 3 planning failures, 4 LP failures.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "delmdp/del.hpp"
#include "delmdp/envs.hpp"
#include "delmdp/harness.hpp"
#include "delmdp/io.hpp"
#include "delmdp/lp.hpp"
#include "delmdp/mdp.hpp"
#include "delmdp/structure.hpp"

namespace {

using namespace delmdp;

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitPlanning = 3;
constexpr int kExitLp = 4;

std::string default_outdir() {
    const char* env = std::getenv("DELMDP_OUTDIR");
    return env ? env : "out";
}

void print_gaps(const Mdp& mdp, const OptimalSolution& sol, const GapTable& gaps) {
    std::printf("g* = %.10g\n", sol.gain_bias.gain);
    std::printf("h* =");
    for (double v : sol.gain_bias.bias) std::printf(" %.10g", v);
    std::printf("\nspan H = %.10g\n", gaps.span);
    std::printf("delta_min = %.10g\n", gaps.delta_min);
    std::printf("%6s %6s %14s %9s\n", "state", "action", "delta", "optimal");
    for (State x = 0; x < mdp.num_states; ++x)
        for (Action a = 0; a < mdp.num_actions; ++a)
            std::printf("%6zu %6zu %14.8g %9s\n", x, a, gaps.at(x, a),
                        gaps.is_suboptimal(x, a) ? "" : "yes");
}

int cmd_solve(const std::string& mdp_file) {
    Mdp mdp = load_mdp(mdp_file);
    ValidationReport rep = validate_mdp(mdp);
    if (rep.ergodicity == ErgodicityVerdict::ProvenNotErgodic) {
        std::fprintf(stderr, "error: MDP is not ergodic\n");
        return kExitValidation;
    }
    if (rep.ergodicity == ErgodicityVerdict::Unknown)
        std::fprintf(stderr, "warning: ergodicity could not be established\n");
    OptimalSolution sol = solve_optimal(mdp, 0);
    GapTable gaps = delta_star(mdp, sol);
    print_gaps(mdp, sol, gaps);
    return 0;
}

int cmd_lb(const std::string& mdp_file, const std::string& structure, double L, double Lp,
           double alpha, double alphap) {
    Mdp mdp = load_mdp(mdp_file);
    OptimalSolution sol = solve_optimal(mdp, 0);
    GapTable gaps = delta_star(mdp, sol);

    ExplorationRates rates;
    if (structure == "unstructured") {
        rates = eta_unstructured(gaps);
    } else if (structure == "lipschitz") {
        if (!mdp.has_embeddings()) {
            std::fprintf(stderr, "error: lipschitz bound needs embeddings in the MDP file\n");
            return kExitValidation;
        }
        StructureSpec spec = StructureSpec::lipschitz(L, Lp, alpha, alphap);
        ConstraintSet cs = build_lip_lp(mdp, spec, gaps);
        rates = solve_exploration(cs, gaps);
        if (rates.feasible) {
            CoveringBounds cb = covering_bounds(mdp, spec, gaps);
            std::printf("S_lip = %zu\nA_lip = %zu\nK upper bound = %.10g\n", cb.s_lip,
                        cb.a_lip, cb.k_upper);
        }
    } else {
        std::fprintf(stderr, "error: structure must be unstructured or lipschitz\n");
        return kExitUsage;
    }

    if (!rates.feasible) {
        std::size_t p = rates.infeasible_witness.value_or(0);
        std::printf("infeasible: witness pair (x=%zu, a=%zu)\n", p / mdp.num_actions,
                    p % mdp.num_actions);
        return 0;
    }
    std::printf("K = %.10g\n", rates.objective);
    std::printf("%6s %6s %14s\n", "state", "action", "eta");
    for (State x = 0; x < mdp.num_states; ++x)
        for (Action a = 0; a < mdp.num_actions; ++a) {
            double e = rates.at(x, a);
            if (std::isinf(e))
                std::printf("%6zu %6zu %14s\n", x, a, "inf");
            else
                std::printf("%6zu %6zu %14.8g\n", x, a, e);
        }
    return 0;
}

int cmd_run(const std::string& config_file, const std::string& outdir_flag) {
    ExperimentConfig cfg = load_experiment_config(config_file);
    if (!outdir_flag.empty()) cfg.output_dir = outdir_flag;
    if (cfg.output_dir.empty()) cfg.output_dir = default_outdir();
    ExperimentResult res = run_experiment(cfg);
    std::size_t failed = 0;
    for (const auto& sum : res.summaries) {
        std::printf("%-24s runs=%zu mean_final_pseudo_regret=%.6g std=%.6g\n",
                    sum.agent.c_str(), sum.completed, sum.mean_final_pseudo_regret,
                    sum.std_final_pseudo_regret);
        failed += sum.failed;
    }
    if (failed) {
        std::fprintf(stderr,
                     "warning: %zu run(s) failed and were excluded from the summary\n",
                     failed);
        for (const auto& rr : res.runs)
            if (rr.trace.failed)
                std::fprintf(stderr, "  %s seed %llu: %s\n", rr.agent.c_str(),
                             static_cast<unsigned long long>(rr.seed),
                             rr.trace.error.c_str());
    }
    std::printf("traces written to %s\n", cfg.output_dir.c_str());
    return 0;
}

int cmd_gen(const std::string& kind, std::size_t states, std::size_t actions,
            double epsilon, double zeta, double floor, std::uint64_t seed,
            const std::string& out_file) {
    Mdp mdp;
    if (kind == "two_cluster") {
        auto inst = make_two_cluster({states, epsilon, zeta, seed});
        mdp = std::move(inst.mdp);
    } else if (kind == "random") {
        mdp = make_random_ergodic(states, actions, seed, floor);
    } else {
        std::fprintf(stderr, "error: kind must be two_cluster or random\n");
        return kExitUsage;
    }
    save_mdp(mdp, out_file);
    std::printf("wrote %s (%zu states, %zu actions)\n", out_file.c_str(), mdp.num_states,
                mdp.num_actions);
    return 0;
}

int cmd_sweep(const std::string& config_file, const std::string& sizes_arg,
              const std::string& outdir_flag) {
    ExperimentConfig cfg = load_experiment_config(config_file);
    if (!outdir_flag.empty()) cfg.output_dir = outdir_flag;
    if (cfg.output_dir.empty()) cfg.output_dir = default_outdir();

    std::vector<std::size_t> sizes;
    std::stringstream ss(sizes_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) sizes.push_back(std::stoul(tok));
    if (sizes.empty()) {
        std::fprintf(stderr, "error: --sizes list is empty\n");
        return kExitUsage;
    }

    auto rows = sweep_sizes(cfg, sizes);
    std::string out_csv = cfg.output_dir + "/sweep_summary.csv";
    write_summary_csv(rows, cfg.horizon, cfg.seeds.size(), out_csv);
    std::printf("%6s %-24s %18s %18s\n", "S", "agent", "mean_pseudo_regret", "std");
    for (const auto& row : rows)
        std::printf("%6zu %-24s %18.6g %18.6g\n", row.num_states, row.agent.c_str(),
                    row.mean_final_pseudo_regret, row.std_final_pseudo_regret);
    std::printf("summary written to %s\n", out_csv.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regret lower bounds and DEL simulation for structured ergodic MDPs"};
    app.require_subcommand(1);

    std::string mdp_file, config_file, csv_file, out_file, outdir_flag;
    std::string structure = "unstructured", sizes = "4,8,12,16,20";
    double L = 1.0, Lp = 1.0, alpha = 1.0, alphap = 1.0;

    auto* solve = app.add_subcommand("solve", "Solve gain/bias/gaps of an MDP file");
    solve->add_option("mdp", mdp_file, "MDP JSON file")->required();

    auto* lb = app.add_subcommand("lb", "Regret lower-bound program for an MDP file");
    lb->add_option("mdp", mdp_file, "MDP JSON file")->required();
    lb->add_option("--structure", structure, "unstructured|lipschitz");
    lb->add_option("--L", L, "state Lipschitz constant");
    lb->add_option("--Lp", Lp, "action Lipschitz constant");
    lb->add_option("--alpha", alpha, "state metric exponent");
    lb->add_option("--alphap", alphap, "action metric exponent");

    auto* run = app.add_subcommand("run", "Run a DEL experiment from a config file");
    run->add_option("--config", config_file, "experiment config JSON")->required();
    run->add_option("--outdir", outdir_flag, "output directory (default $DELMDP_OUTDIR)");

    auto* sweep = app.add_subcommand("sweep", "Sweep two-cluster sizes");
    sweep->add_option("--config", config_file, "experiment config JSON")->required();
    sweep->add_option("--sizes", sizes, "comma-separated even state counts");
    sweep->add_option("--outdir", outdir_flag, "output directory (default $DELMDP_OUTDIR)");

    auto* plot = app.add_subcommand("plot", "Render a harness CSV as SVG (+ .dat)");
    plot->add_option("csv", csv_file, "trace, sweep-summary, or timeseries CSV")->required();
    plot->add_option("-o,--out", out_file, "output SVG path")->required();

    std::string gen_kind;
    std::size_t gen_states = 4, gen_actions = 2;
    double gen_epsilon = 0.1, gen_zeta = 0.1, gen_floor = 0.05;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("gen", "Generate a benchmark MDP file");
    gen->add_option("kind", gen_kind, "two_cluster|random")->required();
    gen->add_option("--states", gen_states, "number of states");
    gen->add_option("--actions", gen_actions, "number of actions (random)");
    gen->add_option("--epsilon", gen_epsilon, "two-cluster leak probability");
    gen->add_option("--zeta", gen_zeta, "two-cluster embedding spread");
    gen->add_option("--floor", gen_floor, "random-MDP transition floor");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("-o,--out", out_file, "output MDP JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(mdp_file);
        if (lb->parsed()) return cmd_lb(mdp_file, structure, L, Lp, alpha, alphap);
        if (run->parsed()) return cmd_run(config_file, outdir_flag);
        if (sweep->parsed()) return cmd_sweep(config_file, sizes, outdir_flag);
        if (plot->parsed()) {
            delmdp::emit_plot(csv_file, out_file);
            std::printf("wrote %s and %s.dat\n", out_file.c_str(), out_file.c_str());
            return 0;
        }
        if (gen->parsed())
            return cmd_gen(gen_kind, gen_states, gen_actions, gen_epsilon, gen_zeta,
                           gen_floor, gen_seed, out_file);
    } catch (const delmdp::FileFormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const delmdp::ReducibleChainError& e) {
        std::fprintf(stderr, "planning error: %s\n", e.what());
        return kExitPlanning;
    } catch (const delmdp::PlanningError& e) {
        std::fprintf(stderr, "planning error: %s\n", e.what());
        return std::string(e.what()).find("LP") != std::string::npos ? kExitLp
                                                                     : kExitPlanning;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
