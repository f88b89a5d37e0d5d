#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "delmdp/del.hpp"
#include "delmdp/envs.hpp"
#include "delmdp/harness.hpp"
#include "delmdp/io.hpp"
#include "delmdp/lp.hpp"
#include "delmdp/mdp.hpp"
#include "delmdp/structure.hpp"

namespace py = pybind11;
using namespace delmdp;

namespace {

Mdp mdp_from_tables(std::size_t S, std::size_t A,
                    const std::vector<std::vector<std::vector<double>>>& transitions,
                    const std::vector<std::vector<double>>& reward_means,
                    const std::vector<std::vector<double>>& state_embedding,
                    const std::vector<std::vector<double>>& action_embedding) {
    Mdp m = Mdp::zeros(S, A);
    for (std::size_t x = 0; x < S; ++x)
        for (std::size_t a = 0; a < A; ++a) {
            for (std::size_t y = 0; y < S; ++y) m.p(x, a, y) = transitions.at(x).at(a).at(y);
            m.r(x, a) = reward_means.at(x).at(a);
        }
    m.state_embedding = state_embedding;
    m.action_embedding = action_embedding;
    return m;
}

}  // namespace

PYBIND11_MODULE(_delmdp, m) {
    m.doc() = "Regret lower bounds and DEL simulation for structured ergodic MDPs";

    py::register_exception<ReducibleChainError>(m, "ReducibleChainError");
    py::register_exception<PlanningError>(m, "PlanningError");
    py::register_exception<FileFormatError>(m, "FileFormatError");

    py::class_<Mdp>(m, "Mdp")
        .def(py::init(&mdp_from_tables), py::arg("num_states"), py::arg("num_actions"),
             py::arg("transitions"), py::arg("reward_means"),
             py::arg("state_embedding") = std::vector<std::vector<double>>{},
             py::arg("action_embedding") = std::vector<std::vector<double>>{})
        .def_readonly("num_states", &Mdp::num_states)
        .def_readonly("num_actions", &Mdp::num_actions)
        .def("p", [](const Mdp& m, State x, Action a, State y) { return m.p(x, a, y); })
        .def("r", [](const Mdp& m, State x, Action a) { return m.r(x, a); })
        .def_readonly("state_embedding", &Mdp::state_embedding)
        .def_readonly("action_embedding", &Mdp::action_embedding);

    py::class_<Policy>(m, "Policy")
        .def(py::init([](std::vector<Action> actions) { return Policy{std::move(actions)}; }))
        .def_readonly("action_of", &Policy::action_of);

    py::class_<GainBias>(m, "GainBias")
        .def_readonly("gain", &GainBias::gain)
        .def_readonly("bias", &GainBias::bias)
        .def_readonly("ref_state", &GainBias::ref_state);

    py::class_<OptimalSolution>(m, "OptimalSolution")
        .def_readonly("gain_bias", &OptimalSolution::gain_bias)
        .def_readonly("optimal_actions", &OptimalSolution::optimal_actions)
        .def_readonly("optimal_policy", &OptimalSolution::optimal_policy);

    py::class_<GapTable>(m, "GapTable")
        .def_readonly("num_states", &GapTable::num_states)
        .def_readonly("num_actions", &GapTable::num_actions)
        .def_readonly("delta", &GapTable::delta)
        .def_readonly("pre_threshold", &GapTable::pre_threshold)
        .def_readonly("delta_min", &GapTable::delta_min)
        .def_readonly("span", &GapTable::span)
        .def_readonly("restricted", &GapTable::restricted)
        .def("at", &GapTable::at)
        .def("is_suboptimal", &GapTable::is_suboptimal);

    py::class_<Correspondence>(m, "Correspondence")
        .def(py::init([](std::vector<std::vector<Action>> allowed) {
            return Correspondence{std::move(allowed)};
        }))
        .def_static("full", &Correspondence::full)
        .def_readonly("allowed", &Correspondence::allowed);

    py::enum_<ErgodicityVerdict>(m, "ErgodicityVerdict")
        .value("ProvenErgodic", ErgodicityVerdict::ProvenErgodic)
        .value("ProvenNotErgodic", ErgodicityVerdict::ProvenNotErgodic)
        .value("Unknown", ErgodicityVerdict::Unknown);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("violations", &ValidationReport::violations)
        .def_readonly("ergodicity", &ValidationReport::ergodicity)
        .def("ok", &ValidationReport::ok);

    m.def("validate_mdp", &validate_mdp);
    m.def("stationary_distribution", &stationary_distribution);
    m.def("bellman_apply", &bellman_apply);
    m.def("evaluate_policy", &evaluate_policy, py::arg("mdp"), py::arg("policy"),
          py::arg("ref_state") = 0);
    m.def("solve_optimal", &solve_optimal, py::arg("mdp"), py::arg("ref_state") = 0);
    m.def("delta_star", &delta_star);
    m.def("delta_star_restricted", &delta_star_restricted, py::arg("mdp"), py::arg("C"),
          py::arg("zeta"), py::arg("ref_state") = 0);
    m.def("threshold_gaps", &threshold_gaps);
    m.def("kl_pair", &kl_pair);

    py::enum_<StructureKind>(m, "StructureKind")
        .value("Unstructured", StructureKind::Unstructured)
        .value("Lipschitz", StructureKind::Lipschitz);

    py::class_<StructureSpec>(m, "StructureSpec")
        .def_static("unstructured", &StructureSpec::unstructured)
        .def_static("lipschitz", &StructureSpec::lipschitz, py::arg("L"), py::arg("L_prime"),
                    py::arg("alpha") = 1.0, py::arg("alpha_prime") = 1.0)
        .def_readonly("kind", &StructureSpec::kind)
        .def_readonly("L", &StructureSpec::L)
        .def_readonly("L_prime", &StructureSpec::L_prime)
        .def_readonly("alpha", &StructureSpec::alpha)
        .def_readonly("alpha_prime", &StructureSpec::alpha_prime);

    py::class_<ConstraintSet>(m, "ConstraintSet")
        .def_readonly("rows", &ConstraintSet::rows)
        .def_readonly("cols", &ConstraintSet::cols)
        .def_readonly("forced_infinite", &ConstraintSet::forced_infinite)
        .def_readonly("infeasible_rows", &ConstraintSet::infeasible_rows)
        .def("structurally_infeasible", &ConstraintSet::structurally_infeasible)
        .def("weight", &ConstraintSet::weight);

    py::class_<ExplorationRates>(m, "ExplorationRates")
        .def_readonly("eta", &ExplorationRates::eta)
        .def_readonly("objective", &ExplorationRates::objective)
        .def_readonly("feasible", &ExplorationRates::feasible)
        .def_readonly("infeasible_witness", &ExplorationRates::infeasible_witness)
        .def("at", &ExplorationRates::at);

    py::class_<CoveringBounds>(m, "CoveringBounds")
        .def_readonly("s_lip", &CoveringBounds::s_lip)
        .def_readonly("a_lip", &CoveringBounds::a_lip)
        .def_readonly("k_upper", &CoveringBounds::k_upper);

    m.def("eta_unstructured", &eta_unstructured);
    m.def("lip_weight", &lip_weight);
    m.def("build_lip_lp", &build_lip_lp);
    m.def("build_un_lp", &build_un_lp);
    m.def("solve_exploration", &solve_exploration);
    m.def("check_membership", &check_membership);
    m.def("covering_bounds", &covering_bounds);

    py::enum_<LpStatus>(m, "LpStatus")
        .value("Optimal", LpStatus::Optimal)
        .value("Infeasible", LpStatus::Infeasible)
        .value("Unbounded", LpStatus::Unbounded);

    py::class_<LpProblem>(m, "LpProblem")
        .def(py::init([](std::vector<double> costs, std::vector<std::vector<double>> G,
                         std::vector<double> rhs) {
                 return LpProblem{std::move(costs), std::move(G), std::move(rhs)};
             }),
             py::arg("costs"), py::arg("constraint_matrix"), py::arg("rhs"))
        .def_readonly("costs", &LpProblem::costs)
        .def_readonly("constraint_matrix", &LpProblem::constraint_matrix)
        .def_readonly("rhs", &LpProblem::rhs);

    py::class_<LpSolution>(m, "LpSolution")
        .def_readonly("status", &LpSolution::status)
        .def_readonly("x", &LpSolution::x)
        .def_readonly("objective", &LpSolution::objective);

    m.def("solve_lp", &solve_lp);

    py::enum_<DelMode>(m, "DelMode")
        .value("Full", DelMode::Full)
        .value("Simplified", DelMode::Simplified);

    py::enum_<Phase>(m, "Phase")
        .value("Monotonize", Phase::Monotonize)
        .value("Estimate", Phase::Estimate)
        .value("Exploit", Phase::Exploit)
        .value("Explore", Phase::Explore);

    py::class_<AgentConfig>(m, "AgentConfig")
        .def(py::init([](DelMode mode, double gamma, StructureSpec structure,
                         std::size_t resolve_every) {
                 return AgentConfig{mode, gamma, structure, resolve_every};
             }),
             py::arg("mode") = DelMode::Full, py::arg("gamma") = 1.0,
             py::arg("structure") = StructureSpec::unstructured(),
             py::arg("resolve_every") = 1)
        .def_readwrite("mode", &AgentConfig::mode)
        .def_readwrite("gamma", &AgentConfig::gamma)
        .def_readwrite("structure", &AgentConfig::structure)
        .def_readwrite("resolve_every", &AgentConfig::resolve_every);

    py::class_<Schedule>(m, "Schedule")
        .def_readonly("zeta_t", &Schedule::zeta_t)
        .def_readonly("gamma_t", &Schedule::gamma_t);

    m.def("rates_schedule", &rates_schedule);

    py::class_<Transition>(m, "Transition")
        .def(py::init([](State x, Action a, double r, State y) {
                 return Transition{x, a, r, y};
             }),
             py::arg("x"), py::arg("a"), py::arg("r"), py::arg("y"))
        .def_readonly("x", &Transition::x)
        .def_readonly("a", &Transition::a)
        .def_readonly("r", &Transition::r)
        .def_readonly("y", &Transition::y);

    py::class_<AgentState>(m, "AgentState")
        .def_readonly("t", &AgentState::t)
        .def_readonly("state_counts", &AgentState::state_counts)
        .def_readonly("pair_counts", &AgentState::pair_counts)
        .def_readonly("empirical", &AgentState::empirical)
        .def_readonly("current_state", &AgentState::current_state);

    m.def("compute_ct", &compute_ct);

    py::class_<DelAgent::Decision>(m, "Decision")
        .def_readonly("action", &DelAgent::Decision::action)
        .def_readonly("phase", &DelAgent::Decision::phase)
        .def_readonly("planning_failed", &DelAgent::Decision::planning_failed);

    py::class_<DelAgent>(m, "DelAgent")
        .def(py::init<std::size_t, std::size_t, AgentConfig, State,
                      std::vector<std::vector<double>>, std::vector<std::vector<double>>>(),
             py::arg("num_states"), py::arg("num_actions"), py::arg("config"),
             py::arg("start_state"),
             py::arg("state_embedding") = std::vector<std::vector<double>>{},
             py::arg("action_embedding") = std::vector<std::vector<double>>{})
        .def("select_action", &DelAgent::select_action)
        .def("observe", &DelAgent::observe)
        .def("state", &DelAgent::state, py::return_value_policy::reference_internal)
        .def("schedule", &DelAgent::schedule)
        .def("current_gap_table", &DelAgent::current_gap_table);

    py::class_<TwoClusterParams>(m, "TwoClusterParams")
        .def(py::init([](std::size_t S, double eps, double zeta, std::uint64_t seed) {
                 return TwoClusterParams{S, eps, zeta, seed};
             }),
             py::arg("num_states") = 4, py::arg("epsilon") = 0.1,
             py::arg("zeta_embed") = 0.1, py::arg("seed") = 0)
        .def_readwrite("num_states", &TwoClusterParams::num_states)
        .def_readwrite("epsilon", &TwoClusterParams::epsilon)
        .def_readwrite("zeta_embed", &TwoClusterParams::zeta_embed)
        .def_readwrite("seed", &TwoClusterParams::seed);

    py::class_<TwoClusterInstance>(m, "TwoClusterInstance")
        .def_readonly("mdp", &TwoClusterInstance::mdp)
        .def_readonly("structure", &TwoClusterInstance::structure);

    m.def("make_two_cluster", &make_two_cluster);
    m.def("make_random_ergodic", &make_random_ergodic, py::arg("num_states"),
          py::arg("num_actions"), py::arg("seed"), py::arg("floor"));
    m.def("attach_random_embeddings", &attach_random_embeddings);

    py::class_<TracePoint>(m, "TracePoint")
        .def_readonly("t", &TracePoint::t)
        .def_readonly("cum_reward", &TracePoint::cum_reward)
        .def_readonly("pseudo_regret", &TracePoint::pseudo_regret)
        .def_readonly("realized_regret", &TracePoint::realized_regret)
        .def_readonly("phase_counts", &TracePoint::phase_counts);

    py::class_<RegretTrace>(m, "RegretTrace")
        .def_readonly("points", &RegretTrace::points)
        .def_readonly("horizon", &RegretTrace::horizon)
        .def_readonly("gain_star", &RegretTrace::gain_star)
        .def_readonly("failed", &RegretTrace::failed)
        .def_readonly("error", &RegretTrace::error);

    m.def(
        "run_episode",
        [](const Mdp& mdp, const StructureSpec& structure, const AgentConfig& cfg,
           std::uint64_t T, std::uint64_t seed, std::uint64_t record_every) {
            return run_episode(mdp, structure, cfg, T, seed, record_every);
        },
        py::arg("mdp"), py::arg("structure"), py::arg("agent_cfg"), py::arg("T"),
        py::arg("seed"), py::arg("record_every") = 100);
    m.def("pseudo_regret", &pseudo_regret);
    m.def("write_trace_csv", &write_trace_csv);
    m.def("emit_plot", &emit_plot);

    m.def("load_mdp", &load_mdp);
    m.def("save_mdp", &save_mdp);
}
