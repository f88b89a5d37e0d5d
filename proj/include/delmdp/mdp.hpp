#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace delmdp {

using State = std::size_t;
using Action = std::size_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerances shared across planning and lower-bound code.
inline constexpr double kRowSumTol = 1e-12;
inline constexpr double kEvalTol = 1e-8;
inline constexpr double kTieTol = 1e-9;
inline constexpr double kFeasTol = 1e-9;

/// Thrown when a policy induces a chain whose evaluation system is singular.
struct ReducibleChainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when planning cannot produce a usable solution (non-convergence,
/// degenerate restriction beyond the communicating-component fallback).
struct PlanningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tabular MDP with Bernoulli rewards. Transition rows p(.|x,a) are stored
/// flat at (x*A+a)*S, reward means at x*A+a. Embeddings are optional and
/// only required for Lipschitz-structure computations.
struct Mdp {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> transitions;   // (x*A+a)*S + y
    std::vector<double> reward_means;  // x*A + a
    std::vector<std::vector<double>> state_embedding;   // S rows, uniform dim
    std::vector<std::vector<double>> action_embedding;  // A rows, uniform dim

    double p(State x, Action a, State y) const {
        return transitions[(x * num_actions + a) * num_states + y];
    }
    double& p(State x, Action a, State y) {
        return transitions[(x * num_actions + a) * num_states + y];
    }
    double r(State x, Action a) const { return reward_means[x * num_actions + a]; }
    double& r(State x, Action a) { return reward_means[x * num_actions + a]; }

    const double* row(State x, Action a) const {
        return transitions.data() + (x * num_actions + a) * num_states;
    }

    bool has_embeddings() const {
        return !state_embedding.empty() && !action_embedding.empty();
    }

    /// Allocates an S x A x S / S x A zero-filled shell.
    static Mdp zeros(std::size_t S, std::size_t A) {
        Mdp m;
        m.num_states = S;
        m.num_actions = A;
        m.transitions.assign(S * A * S, 0.0);
        m.reward_means.assign(S * A, 0.0);
        return m;
    }
};

/// Deterministic stationary policy.
struct Policy {
    std::vector<Action> action_of;  // state index -> action index
};

struct GainBias {
    double gain = 0.0;
    std::vector<double> bias;  // h, pinned h(ref_state) = 0
    State ref_state = 0;
};

struct OptimalSolution {
    GainBias gain_bias;
    std::vector<std::vector<Action>> optimal_actions;  // O(x), sorted ascending
    Policy optimal_policy;                             // lowest-index member of O(x)
};

/// Per-state nonempty action restriction C : S ->> A.
struct Correspondence {
    std::vector<std::vector<Action>> allowed;  // sorted ascending, nonempty

    static Correspondence full(std::size_t S, std::size_t A) {
        Correspondence c;
        c.allowed.assign(S, {});
        for (auto& v : c.allowed) {
            v.resize(A);
            for (Action a = 0; a < A; ++a) v[a] = a;
        }
        return c;
    }
};

/// Gap table delta(x,a) together with the quantities the lower-bound programs
/// need. For tables produced by delta_star_restricted, `delta` holds the
/// zeta-thresholded values, `pre_threshold` the raw ones, and `restricted` is
/// true; `suboptimal` marks a not in O(x; phi(C)).
struct GapTable {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> delta;               // operative (thresholded) values
    std::vector<double> pre_threshold;       // raw values (restricted tables)
    std::vector<std::uint8_t> suboptimal;    // 1 iff a not in O(x; phi(C))
    double delta_min = kInf;                 // min over strictly positive entries
    double span = 0.0;                       // H of the associated bias
    bool restricted = false;

    double at(State x, Action a) const { return delta[x * num_actions + a]; }
    bool is_suboptimal(State x, Action a) const {
        return suboptimal[x * num_actions + a] != 0;
    }
};

enum class ErgodicityVerdict { ProvenErgodic, ProvenNotErgodic, Unknown };

struct ValidationReport {
    std::vector<std::string> violations;
    ErgodicityVerdict ergodicity = ErgodicityVerdict::Unknown;
    std::optional<Policy> non_ergodic_witness;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_mdp(const Mdp& mdp);

/// Stationary distribution of the chain induced by f. Throws
/// ReducibleChainError when the balance system is singular.
std::vector<double> stationary_distribution(const Mdp& mdp, const Policy& f);

/// (B^a h)(x) = r(x,a) + sum_y p(y|x,a) h(y).
double bellman_apply(const Mdp& mdp, const std::vector<double>& h, State x, Action a);

/// Solves the evaluation equation g + h(x) = (B^{f(x)} h)(x) with h(ref) = 0.
GainBias evaluate_policy(const Mdp& mdp, const Policy& f, State ref_state);

/// Howard policy iteration with exact linear-system evaluation.
OptimalSolution solve_optimal(const Mdp& mdp, State ref_state = 0);

/// delta*(x,a) = (B* h*)(x) - (B^a h*)(x) from an optimal solution.
GapTable delta_star(const Mdp& mdp, const OptimalSolution& sol);

/// Restricted-and-thresholded gaps delta*(x,a; phi, C, zeta). Falls back to
/// the communicating component of ref_state when the restricted MDP is
/// reducible; throws PlanningError beyond that.
GapTable delta_star_restricted(const Mdp& mdp, const Correspondence& C, double zeta,
                               State ref_state);

/// Re-applies the zeta threshold: entries <= zeta become exactly 0.
GapTable threshold_gaps(const GapTable& gaps, double zeta);

/// KL divergence between phi and psi at (x,a): discrete transition KL plus
/// Bernoulli reward KL. Returns +inf on absolute-continuity violations.
double kl_pair(const Mdp& phi, const Mdp& psi, State x, Action a);

// Internals shared with the DEL agent: optimal solution of the restricted
// MDP phi(C), solved on the full state space when possible and on the
// communicating component of ref otherwise (bias 0 outside the component).
struct RestrictedSolution {
    GainBias gain_bias;
    std::vector<std::vector<Action>> optimal_actions;  // O(x; phi(C)) subset of C(x)
    bool used_component_fallback = false;
};

RestrictedSolution solve_optimal_restricted(const Mdp& mdp, const Correspondence& C,
                                            State ref_state,
                                            const Policy* warm_start = nullptr);

/// Gap table from an already-solved restriction (shared path for the agent).
GapTable gaps_from_restricted(const Mdp& mdp, const Correspondence& C,
                              const RestrictedSolution& sol, double zeta);

}  // namespace delmdp
