#pragma once

#include <cstdint>
#include <random>

#include "delmdp/del.hpp"
#include "delmdp/mdp.hpp"
#include "delmdp/structure.hpp"

namespace delmdp {

/// Seeded generator. Draws go through uniform01/pick_categorical below so
/// streams are identical across platforms.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Two-cluster benchmark: clusters S1 = {0..S/2-1} and S2 = {S/2..S-1},
/// actions stay = 0 and move = 1 (embedded at 0 and 1). Stay redraws a state
/// inside the cluster, move jumps to the other cluster, each with leak
/// epsilon; reward 1 exactly for (x in S1, move).
struct TwoClusterParams {
    std::size_t num_states = 4;   // even
    double epsilon = 0.1;         // in (0, 0.5)
    double zeta_embed = 0.1;      // embedding spread, in (0,1)
    std::uint64_t seed = 0;
};

struct TwoClusterInstance {
    Mdp mdp;
    StructureSpec structure;  // Lipschitz, L = L' = 2, alpha = alpha' = 1
};

TwoClusterInstance make_two_cluster(const TwoClusterParams& params);

/// Random MDP whose rows are floor-smoothed distributions (every entry
/// >= floor), hence provably ergodic; rewards uniform in [0,1].
Mdp make_random_ergodic(std::size_t num_states, std::size_t num_actions,
                        std::uint64_t seed, double floor);

/// Attaches i.i.d. uniform [0,1]^d embeddings (property-test fodder).
void attach_random_embeddings(Mdp& mdp, std::size_t state_dim, std::size_t action_dim,
                              std::uint64_t seed);

/// Samples the next state from p(.|x,a) and a Bernoulli reward.
Transition sample_step(const Mdp& mdp, State x, Action a, Rng& rng);

}  // namespace delmdp
