#include "delmdp/envs.hpp"

#include <algorithm>
#include <stdexcept>

namespace delmdp {

TwoClusterInstance make_two_cluster(const TwoClusterParams& params) {
    std::size_t S = params.num_states;
    if (S < 2 || S % 2 != 0)
        throw std::invalid_argument("two-cluster: num_states must be even and >= 2");
    if (params.epsilon <= 0.0 || params.epsilon >= 0.5)
        throw std::invalid_argument("two-cluster: epsilon must lie in (0, 0.5)");
    if (params.zeta_embed <= 0.0 || params.zeta_embed >= 1.0)
        throw std::invalid_argument("two-cluster: zeta_embed must lie in (0, 1)");

    const std::size_t half = S / 2;
    const Action stay = 0, move = 1;
    Mdp mdp = Mdp::zeros(S, 2);

    const double in_target = 2.0 * (1.0 - params.epsilon) / static_cast<double>(S);
    const double off_target = 2.0 * params.epsilon / static_cast<double>(S);
    for (State x = 0; x < S; ++x) {
        bool x_first = x < half;
        for (State y = 0; y < S; ++y) {
            bool same = (y < half) == x_first;
            mdp.p(x, stay, y) = same ? in_target : off_target;
            mdp.p(x, move, y) = same ? off_target : in_target;
        }
        mdp.r(x, move) = x_first ? 1.0 : 0.0;
    }

    Rng rng(params.seed);
    mdp.state_embedding.resize(S);
    for (State x = 0; x < S; ++x) {
        double u = uniform01(rng);
        double e = x < half ? -params.zeta_embed + u * params.zeta_embed
                            : 1.0 + u * params.zeta_embed;
        mdp.state_embedding[x] = {e};
    }
    mdp.action_embedding = {{0.0}, {1.0}};

    return {std::move(mdp), StructureSpec::lipschitz(2.0, 2.0, 1.0, 1.0)};
}

Mdp make_random_ergodic(std::size_t num_states, std::size_t num_actions,
                        std::uint64_t seed, double floor) {
    if (num_states < 1 || num_actions < 1)
        throw std::invalid_argument("make_random_ergodic: sizes must be >= 1");
    if (floor <= 0.0 || floor * static_cast<double>(num_states) > 1.0)
        throw std::invalid_argument("make_random_ergodic: need 0 < floor*S <= 1");

    Rng rng(seed);
    Mdp mdp = Mdp::zeros(num_states, num_actions);
    const double mass = 1.0 - floor * static_cast<double>(num_states);
    for (State x = 0; x < num_states; ++x) {
        for (Action a = 0; a < num_actions; ++a) {
            double* row = &mdp.p(x, a, 0);
            double sum = 0.0;
            for (State y = 0; y < num_states; ++y) {
                row[y] = uniform01(rng) + 1e-9;
                sum += row[y];
            }
            double rest = 0.0;
            for (State y = 0; y < num_states; ++y) {
                row[y] = floor + mass * row[y] / sum;
                rest += row[y];
            }
            row[num_states - 1] += 1.0 - rest;  // kill rounding drift
            mdp.r(x, a) = uniform01(rng);
        }
    }
    return mdp;
}

void attach_random_embeddings(Mdp& mdp, std::size_t state_dim, std::size_t action_dim,
                              std::uint64_t seed) {
    Rng rng(seed);
    mdp.state_embedding.assign(mdp.num_states, std::vector<double>(state_dim));
    for (auto& row : mdp.state_embedding)
        for (auto& v : row) v = uniform01(rng);
    mdp.action_embedding.assign(mdp.num_actions, std::vector<double>(action_dim));
    for (auto& row : mdp.action_embedding)
        for (auto& v : row) v = uniform01(rng);
}

Transition sample_step(const Mdp& mdp, State x, Action a, Rng& rng) {
    if (x >= mdp.num_states || a >= mdp.num_actions)
        throw std::out_of_range("sample_step: index out of range");
    double u = uniform01(rng);
    const double* row = mdp.row(x, a);
    State y = mdp.num_states - 1;
    double acc = 0.0;
    for (State cand = 0; cand < mdp.num_states; ++cand) {
        acc += row[cand];
        if (u < acc) {
            y = cand;
            break;
        }
    }
    double reward = uniform01(rng) < mdp.r(x, a) ? 1.0 : 0.0;
    return {x, a, reward, y};
}

}  // namespace delmdp
