#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "delmdp/mdp.hpp"
#include "delmdp/structure.hpp"

namespace delmdp {

enum class DelMode { Full, Simplified };

enum class Phase : std::uint8_t { Monotonize = 0, Estimate = 1, Exploit = 2, Explore = 3 };

const char* to_string(Phase p);

struct AgentConfig {
    DelMode mode = DelMode::Full;
    double gamma = 1.0;  // Simplified mode pins gamma = 1 and zeta_t = 0
    StructureSpec structure;
    std::size_t resolve_every = 1;  // exploration-program re-solve cadence
};

/// Step schedules: zeta_t = 1/(1 + max(0, ln ln t)) and
/// gamma_t = (1+gamma)(1 + ln t), with ln t := 0 for t < 1.
struct Schedule {
    double zeta_t = 0.0;
    double gamma_t = 0.0;
};

Schedule rates_schedule(std::uint64_t t, double gamma, DelMode mode);

struct Transition {
    State x;
    Action a;
    double r;  // observed reward, {0,1} for Bernoulli draws
    State y;
};

struct AgentState {
    std::uint64_t t = 1;
    std::vector<std::uint64_t> state_counts;  // N_t(x)
    std::vector<std::uint64_t> pair_counts;   // N_t(x,a)
    Mdp empirical;                            // p_t, r_t (embeddings attached)
    State current_state = 0;
    Phase last_phase = Phase::Monotonize;

    std::uint64_t n(State x) const { return state_counts[x]; }
    std::uint64_t n(State x, Action a) const {
        return pair_counts[x * empirical.num_actions + a];
    }
};

/// C_t(x) = {a : N_t(x,a) >= (ln N_t(x))^2}, with the conventions ln 0 =
/// ln 1 = 0 (untouched states admit every action). If the raw rule yields an
/// empty set the most-visited action is kept so the correspondence stays
/// nonempty.
Correspondence compute_ct(const AgentState& agent);

/// DEL(gamma): tracks the empirical MDP and selects actions through the
/// monotonize / estimate / exploit / explore phases of the restricted
/// empirical problem.
class DelAgent {
  public:
    struct Decision {
        Action action;
        Phase phase;
        bool planning_failed = false;  // estimate fallback taken
    };

    DelAgent(std::size_t num_states, std::size_t num_actions, AgentConfig config,
             State start_state, std::vector<std::vector<double>> state_embedding = {},
             std::vector<std::vector<double>> action_embedding = {});

    /// Chooses the action for the current step; x must be the current state.
    Decision select_action(State x);

    /// Folds one observed transition into counts and empirical kernels.
    void observe(const Transition& tr);

    const AgentState& state() const { return state_; }
    Schedule schedule() const;

    /// delta*(.,.; phi_t, C_t, zeta_t) for the current step.
    GapTable current_gap_table() const;

  private:
    struct PlanCache {
        std::uint64_t solved_at = 0;
        Correspondence ct;
        std::vector<std::vector<Action>> optimal_actions;
        ConstraintSet constraints;
        GapTable gaps;
        bool valid = false;
    };

    Action least_counted(State x, const std::vector<Action>& among) const;

    AgentConfig config_;
    AgentState state_;
    Policy warm_policy_;
    PlanCache cache_;
};

}  // namespace delmdp
