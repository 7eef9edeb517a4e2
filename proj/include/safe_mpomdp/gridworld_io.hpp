#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridworld.hpp"

namespace safe_mpomdp::grid {

namespace detail {

inline Cell cell_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw InvalidConfig("a cell must be a [row, col] pair");
    return Cell{j[0].get<int>(), j[1].get<int>()};
}

inline SensorModel sensor_from_json(const nlohmann::json& j, SensorModel s) {
    s.radius = j.value("radius", s.radius);
    s.habitable_accuracy = j.value("habitable_accuracy", s.habitable_accuracy);
    s.sample_accuracy = j.value("sample_accuracy", s.sample_accuracy);
    return s;
}

}  // namespace detail

// Habitability map: list of row strings ('.' or '1' habitable, '#' or '0'
// not), or a nested 0/1 array.
inline ScenarioConfig scenario_config_from_json(const nlohmann::json& j) {
    try {
        ScenarioConfig c;
        const auto& grid = j.at("grid");
        c.rows = grid.at(0).get<int>();
        c.cols = grid.at(1).get<int>();

        if (j.contains("agents")) {
            const auto& a = j.at("agents");
            for (std::size_t r = 0; r < kRobots; ++r)
                if (a.contains(kRobotNames[r])) c.starts[r] = detail::cell_from_json(a.at(kRobotNames[r]));
        }

        const auto& truth = j.at("truth");
        if (truth.contains("habitable")) {
            for (const auto& row : truth.at("habitable")) {
                if (row.is_string()) {
                    c.habitable_map.push_back(row.get<std::string>());
                    continue;
                }
                std::string line;
                for (const auto& v : row) line.push_back(v.get<int>() != 0 ? '.' : '#');
                c.habitable_map.push_back(line);
            }
        }
        if (truth.contains("sample")) c.sample = detail::cell_from_json(truth.at("sample"));

        if (j.contains("sensing")) {
            const auto& s = j.at("sensing");
            for (std::size_t r = 0; r < kRobots; ++r)
                if (s.contains(kRobotNames[r])) c.sensing[r] = detail::sensor_from_json(s.at(kRobotNames[r]), c.sensing[r]);
        }
        if (j.contains("motion")) c.p_succ = j.at("motion").value("p_succ", c.p_succ);
        if (j.contains("safety")) {
            const auto& s = j.at("safety");
            c.theta = s.value("theta", c.theta);
            c.alpha0 = s.value("alpha0", c.alpha0);
            if (s.contains("flipper_theta")) c.flipper_theta = s.at("flipper_theta").get<double>();
        }
        if (j.contains("rewards")) {
            const auto& w = j.at("rewards");
            c.weights.info_habitable = w.value("info_habitable", c.weights.info_habitable);
            c.weights.info_sample = w.value("info_sample", c.weights.info_sample);
            c.weights.sample_attract = w.value("sample_attract", c.weights.sample_attract);
            c.weights.danger = w.value("danger", c.weights.danger);
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("malformed scenario: ") + e.what());
    }
}

inline nlohmann::ordered_json scenario_config_to_json(const ScenarioConfig& c) {
    nlohmann::ordered_json j;
    j["grid"] = {c.rows, c.cols};
    for (std::size_t r = 0; r < kRobots; ++r) j["agents"][kRobotNames[r]] = {c.starts[r].row, c.starts[r].col};
    if (c.habitable_map.empty()) {
        j["truth"]["habitable"] = std::vector<std::string>(c.rows, std::string(c.cols, '.'));
    } else {
        j["truth"]["habitable"] = c.habitable_map;
    }
    if (c.sample) j["truth"]["sample"] = {c.sample->row, c.sample->col};
    for (std::size_t r = 0; r < kRobots; ++r)
        j["sensing"][kRobotNames[r]] = {{"radius", c.sensing[r].radius},
                                        {"habitable_accuracy", c.sensing[r].habitable_accuracy},
                                        {"sample_accuracy", c.sensing[r].sample_accuracy}};
    j["motion"]["p_succ"] = c.p_succ;
    j["safety"]["theta"] = c.theta;
    j["safety"]["alpha0"] = c.alpha0;
    if (c.flipper_theta) j["safety"]["flipper_theta"] = *c.flipper_theta;
    j["rewards"] = {{"info_habitable", c.weights.info_habitable},
                    {"info_sample", c.weights.info_sample},
                    {"sample_attract", c.weights.sample_attract},
                    {"danger", c.weights.danger}};
    return j;
}

}  // namespace safe_mpomdp::grid
