#pragma once

#include <string>

#include "delmdp/harness.hpp"
#include "delmdp/mdp.hpp"

namespace delmdp {

/// Raised on malformed files; message carries the first violation with
/// indices.
struct FileFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// MDP document: JSON with num_states, num_actions, transitions (SxAxS),
/// reward_means (SxA), optional state_embedding / action_embedding and
/// reward_distribution (only "bernoulli" is accepted).
Mdp load_mdp(const std::string& path);
void save_mdp(const Mdp& mdp, const std::string& path);

ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace delmdp
