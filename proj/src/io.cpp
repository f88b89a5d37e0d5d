#include "delmdp/io.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace delmdp {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileFormatError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FileFormatError(path + ": " + e.what());
    }
}

std::vector<std::vector<double>> parse_embedding(const json& arr, std::size_t rows,
                                                 const std::string& what) {
    if (!arr.is_array() || arr.size() != rows)
        throw FileFormatError(what + " must be an array with " + std::to_string(rows) +
                              " rows");
    std::vector<std::vector<double>> out(rows);
    std::size_t dim = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!arr[i].is_array())
            throw FileFormatError(what + " row " + std::to_string(i) + " is not an array");
        if (i == 0)
            dim = arr[i].size();
        else if (arr[i].size() != dim)
            throw FileFormatError(what + " row " + std::to_string(i) +
                                  " has dimension " + std::to_string(arr[i].size()) +
                                  ", expected " + std::to_string(dim));
        out[i] = arr[i].get<std::vector<double>>();
    }
    return out;
}

}  // namespace

Mdp load_mdp(const std::string& path) {
    json doc = read_json(path);
    Mdp mdp;
    try {
        mdp.num_states = doc.at("num_states").get<std::size_t>();
        mdp.num_actions = doc.at("num_actions").get<std::size_t>();
    } catch (const json::exception& e) {
        throw FileFormatError(path + ": " + e.what());
    }
    std::size_t S = mdp.num_states, A = mdp.num_actions;
    if (S < 1 || A < 1) throw FileFormatError(path + ": num_states/num_actions must be >= 1");

    std::string dist = doc.value("reward_distribution", std::string("bernoulli"));
    if (dist != "bernoulli")
        throw FileFormatError(path + ": reward_distribution '" + dist +
                              "' not supported (rewards are Bernoulli)");

    const json& tr = doc.at("transitions");
    if (!tr.is_array() || tr.size() != S)
        throw FileFormatError(path + ": transitions must have " + std::to_string(S) +
                              " state rows");
    mdp.transitions.assign(S * A * S, 0.0);
    for (std::size_t x = 0; x < S; ++x) {
        if (!tr[x].is_array() || tr[x].size() != A)
            throw FileFormatError(path + ": transitions[" + std::to_string(x) +
                                  "] must have " + std::to_string(A) + " action rows");
        for (std::size_t a = 0; a < A; ++a) {
            if (!tr[x][a].is_array() || tr[x][a].size() != S)
                throw FileFormatError(path + ": transitions[" + std::to_string(x) + "][" +
                                      std::to_string(a) + "] must have " +
                                      std::to_string(S) + " entries");
            for (std::size_t y = 0; y < S; ++y) mdp.p(x, a, y) = tr[x][a][y].get<double>();
        }
    }

    const json& rm = doc.at("reward_means");
    if (!rm.is_array() || rm.size() != S)
        throw FileFormatError(path + ": reward_means must have " + std::to_string(S) +
                              " rows");
    mdp.reward_means.assign(S * A, 0.0);
    for (std::size_t x = 0; x < S; ++x) {
        if (!rm[x].is_array() || rm[x].size() != A)
            throw FileFormatError(path + ": reward_means[" + std::to_string(x) +
                                  "] must have " + std::to_string(A) + " entries");
        for (std::size_t a = 0; a < A; ++a) mdp.r(x, a) = rm[x][a].get<double>();
    }

    if (doc.contains("state_embedding"))
        mdp.state_embedding = parse_embedding(doc["state_embedding"], S, "state_embedding");
    if (doc.contains("action_embedding"))
        mdp.action_embedding =
            parse_embedding(doc["action_embedding"], A, "action_embedding");

    ValidationReport rep = validate_mdp(mdp);
    if (!rep.ok()) throw FileFormatError(path + ": " + rep.violations.front());
    return mdp;
}

void save_mdp(const Mdp& mdp, const std::string& path) {
    std::size_t S = mdp.num_states, A = mdp.num_actions;
    json doc;
    doc["num_states"] = S;
    doc["num_actions"] = A;
    doc["reward_distribution"] = "bernoulli";
    json tr = json::array();
    for (std::size_t x = 0; x < S; ++x) {
        json per_state = json::array();
        for (std::size_t a = 0; a < A; ++a) {
            json row = json::array();
            for (std::size_t y = 0; y < S; ++y) row.push_back(mdp.p(x, a, y));
            per_state.push_back(std::move(row));
        }
        tr.push_back(std::move(per_state));
    }
    doc["transitions"] = std::move(tr);
    json rm = json::array();
    for (std::size_t x = 0; x < S; ++x) {
        json row = json::array();
        for (std::size_t a = 0; a < A; ++a) row.push_back(mdp.r(x, a));
        rm.push_back(std::move(row));
    }
    doc["reward_means"] = std::move(rm);
    if (!mdp.state_embedding.empty()) doc["state_embedding"] = mdp.state_embedding;
    if (!mdp.action_embedding.empty()) doc["action_embedding"] = mdp.action_embedding;

    std::ofstream out(path);
    if (!out) throw FileFormatError("cannot open " + path + " for writing");
    out << doc.dump(1) << "\n";
}

ExperimentConfig load_experiment_config(const std::string& path) {
    json doc = read_json(path);
    ExperimentConfig cfg;
    try {
        const json& env = doc.at("env");
        std::string type = env.at("type").get<std::string>();
        if (type == "two_cluster") {
            TwoClusterParams params;
            params.num_states = env.value("num_states", 4);
            params.epsilon = env.value("epsilon", 0.1);
            params.zeta_embed = env.value("zeta_embed", 0.1);
            cfg.two_cluster = params;
        } else if (type == "mdp_file") {
            cfg.mdp_file = env.at("path").get<std::string>();
        } else {
            throw FileFormatError(path + ": unknown env type '" + type + "'");
        }

        cfg.horizon = doc.at("horizon").get<std::uint64_t>();
        if (doc.at("seeds").is_array()) {
            cfg.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
        } else {
            std::uint64_t base = doc["seeds"].value("base", 1);
            std::uint64_t count = doc["seeds"].at("count").get<std::uint64_t>();
            for (std::uint64_t i = 0; i < count; ++i) cfg.seeds.push_back(base + i);
        }
        cfg.output_dir = doc.value("output_dir", std::string());
        cfg.record_every = doc.value("record_every", 100);
        cfg.threads = doc.value("threads", 0);

        for (const json& aj : doc.at("agents")) {
            AgentSpec spec;
            spec.name = aj.at("name").get<std::string>();
            AgentConfig& ac = spec.config;
            std::string mode = aj.value("mode", std::string("simplified"));
            if (mode == "full")
                ac.mode = DelMode::Full;
            else if (mode == "simplified")
                ac.mode = DelMode::Simplified;
            else
                throw FileFormatError(path + ": unknown mode '" + mode + "'");
            ac.gamma = aj.value("gamma", 1.0);
            ac.resolve_every = aj.value("resolve_every", 1);
            std::string structure = aj.value("structure", std::string("unstructured"));
            if (structure == "unstructured") {
                ac.structure = StructureSpec::unstructured();
            } else if (structure == "lipschitz") {
                // missing constants fall back to the environment's canonical
                // values (two-cluster: L = L' = 2, alpha = alpha' = 1)
                double nan = std::nan("");
                ac.structure = StructureSpec::lipschitz(
                    aj.value("L", nan), aj.value("L_prime", nan), aj.value("alpha", 1.0),
                    aj.value("alpha_prime", 1.0));
            } else {
                throw FileFormatError(path + ": unknown structure '" + structure + "'");
            }
            cfg.agents.push_back(std::move(spec));
        }
    } catch (const json::exception& e) {
        throw FileFormatError(path + ": " + e.what());
    }
    if (cfg.agents.empty()) throw FileFormatError(path + ": agents list is empty");
    if (cfg.seeds.empty()) throw FileFormatError(path + ": seeds list is empty");
    return cfg;
}

}  // namespace delmdp
