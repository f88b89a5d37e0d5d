#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "delmdp/envs.hpp"
#include "delmdp/io.hpp"

using namespace delmdp;

namespace {

std::string temp_file(const std::string& name, const std::string& content = {}) {
    auto path = (std::filesystem::temp_directory_path() / name).string();
    if (!content.empty()) {
        std::ofstream out(path);
        out << content;
    }
    return path;
}

}  // namespace

TEST_CASE("mdp save/load round trip preserves tables and embeddings") {
    auto inst = make_two_cluster({6, 0.15, 0.2, 21});
    auto path = temp_file("delmdp_roundtrip.json");
    save_mdp(inst.mdp, path);
    Mdp loaded = load_mdp(path);
    CHECK(loaded.num_states == 6);
    CHECK(loaded.num_actions == 2);
    CHECK(loaded.transitions == inst.mdp.transitions);
    CHECK(loaded.reward_means == inst.mdp.reward_means);
    CHECK(loaded.state_embedding == inst.mdp.state_embedding);
    CHECK(loaded.action_embedding == inst.mdp.action_embedding);
}

TEST_CASE("loader reports the first row-sum violation with indices") {
    auto path = temp_file("delmdp_rowsum.json", R"({
      "num_states": 2, "num_actions": 1,
      "transitions": [[[0.5, 0.4]], [[0.5, 0.5]]],
      "reward_means": [[0.0], [1.0]]
    })");
    try {
        load_mdp(path);
        FAIL("expected FileFormatError");
    } catch (const FileFormatError& e) {
        CHECK(std::string(e.what()).find("(x=0,a=0)") != std::string::npos);
    }
}

TEST_CASE("loader rejects malformed shapes and non-Bernoulli rewards") {
    auto missing = temp_file("delmdp_missing.json", R"({"num_states": 1})");
    CHECK_THROWS_AS(load_mdp(missing), FileFormatError);

    auto ragged = temp_file("delmdp_ragged.json", R"({
      "num_states": 2, "num_actions": 1,
      "transitions": [[[1.0, 0.0]], [[0.0, 1.0]]],
      "reward_means": [[0.0], [1.0]],
      "state_embedding": [[0.1], [0.2, 0.3]]
    })");
    try {
        load_mdp(ragged);
        FAIL("expected FileFormatError");
    } catch (const FileFormatError& e) {
        CHECK(std::string(e.what()).find("state_embedding") != std::string::npos);
    }

    auto gauss = temp_file("delmdp_gauss.json", R"({
      "num_states": 1, "num_actions": 1,
      "reward_distribution": "gaussian",
      "transitions": [[[1.0]]],
      "reward_means": [[0.5]]
    })");
    CHECK_THROWS_AS(load_mdp(gauss), FileFormatError);
}

TEST_CASE("experiment config parsing: seeds list and base/count form") {
    auto path = temp_file("delmdp_cfg.json", R"({
      "env": {"type": "two_cluster", "num_states": 8, "epsilon": 0.1, "zeta_embed": 0.1},
      "horizon": 1000,
      "seeds": {"base": 3, "count": 4},
      "record_every": 250,
      "agents": [
        {"name": "un", "mode": "simplified", "structure": "unstructured"},
        {"name": "lip", "mode": "full", "gamma": 0.5, "structure": "lipschitz"}
      ]
    })");
    auto cfg = load_experiment_config(path);
    CHECK(cfg.two_cluster->num_states == 8);
    CHECK(cfg.horizon == 1000);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 4, 5, 6});
    REQUIRE(cfg.agents.size() == 2);
    CHECK(cfg.agents[0].config.mode == DelMode::Simplified);
    CHECK(cfg.agents[1].config.mode == DelMode::Full);
    CHECK(cfg.agents[1].config.gamma == 0.5);
    CHECK(cfg.agents[1].config.structure.kind == StructureKind::Lipschitz);
    // unset Lipschitz constants stay NaN until the env fills them
    CHECK(std::isnan(cfg.agents[1].config.structure.L));
}

TEST_CASE("experiment config rejects unknown env types and empty agent lists") {
    auto bad_env = temp_file("delmdp_cfg_bad.json", R"({
      "env": {"type": "gridworld"}, "horizon": 10, "seeds": [1],
      "agents": [{"name": "un"}]
    })");
    CHECK_THROWS_AS(load_experiment_config(bad_env), FileFormatError);

    auto no_agents = temp_file("delmdp_cfg_noagents.json", R"({
      "env": {"type": "two_cluster"}, "horizon": 10, "seeds": [1], "agents": []
    })");
    CHECK_THROWS_AS(load_experiment_config(no_agents), FileFormatError);
}
