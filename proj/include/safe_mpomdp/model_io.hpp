#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "model.hpp"

namespace safe_mpomdp {

// JSON layout:
//   agents, states, initial_belief,
//   actions / observations      : one name list per agent
//   transition     [q][joint_a][q']
//   observation_fn [q'][joint_a][joint_z]
//   reward         [q][joint_a]
inline MpomdpModel model_from_json(const nlohmann::json& j) {
    MpomdpModel m;
    try {
        m.agents = j.at("agents").get<std::vector<std::string>>();
        const auto& states = j.at("states");
        if (states.is_number_integer()) {
            if (states.get<long long>() < 0) throw InvalidModel("state count is negative", {"state count is negative"});
            for (std::size_t q = 0; q < states.get<std::size_t>(); ++q) m.states.push_back("q" + std::to_string(q));
        } else {
            m.states = states.get<std::vector<std::string>>();
        }
        m.initial_belief = j.at("initial_belief").get<std::vector<double>>();
        m.actions = j.at("actions").get<std::vector<std::vector<std::string>>>();
        m.observations = j.at("observations").get<std::vector<std::vector<std::string>>>();
        m.transition = j.at("transition").get<MpomdpModel::Tensor3>();
        m.observation = j.at("observation_fn").get<MpomdpModel::Tensor3>();
        m.reward = j.at("reward").get<MpomdpModel::Matrix>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidModel(std::string("malformed model document: ") + e.what(), {e.what()});
    }
    require_valid(m);
    return m;
}

inline nlohmann::json model_to_json(const MpomdpModel& m) {
    nlohmann::ordered_json j;
    j["agents"] = m.agents;
    j["states"] = m.states;
    j["initial_belief"] = m.initial_belief;
    j["actions"] = m.actions;
    j["observations"] = m.observations;
    j["transition"] = m.transition;
    j["observation_fn"] = m.observation;
    j["reward"] = m.reward;
    return nlohmann::json(j);
}

inline MpomdpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidModel("model file is not valid JSON: " + path, {e.what()});
    }
    return model_from_json(j);
}

}  // namespace safe_mpomdp
