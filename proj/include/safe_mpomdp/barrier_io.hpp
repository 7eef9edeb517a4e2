#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "belief.hpp"
#include "dtbf.hpp"

namespace safe_mpomdp {

class InvalidBarrierConfig : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Composition composition_from_string(const std::string& s) {
    if (s == "single") return Composition::Single;
    if (s == "conjunction" || s == "and" || s == "min") return Composition::Conjunction;
    if (s == "disjunction" || s == "or" || s == "max") return Composition::Disjunction;
    throw InvalidBarrierConfig("unknown composition '" + s + "'");
}

// One declarative component over a tabular belief:
//   {"type": "linear-threshold", "states": [..], "threshold": c}  h = sum_{q in states} b(q) - c
//   {"type": "weighted-probability", "weights": [..], "threshold": c}  h = sum_q w_q b(q) - c
// Either may carry "negated": true.
inline BarrierComponent<Belief> barrier_component_from_json(const nlohmann::json& j, std::size_t num_states) {
    const auto type = j.at("type").get<std::string>();
    const double threshold = j.value("threshold", 0.0);
    std::vector<double> weights(num_states, 0.0);
    if (type == "linear-threshold") {
        for (auto q : j.at("states").get<std::vector<std::size_t>>()) {
            if (q >= num_states) throw InvalidBarrierConfig("barrier state index out of range");
            weights[q] = 1.0;
        }
    } else if (type == "weighted-probability") {
        weights = j.at("weights").get<std::vector<double>>();
        if (weights.size() != num_states) throw InvalidBarrierConfig("barrier weights do not match the state count");
    } else {
        throw InvalidBarrierConfig("unknown barrier type '" + type + "'");
    }
    BarrierComponent<Belief> c;
    c.h = [weights, threshold](const Belief& b) {
        double v = -threshold;
        for (std::size_t q = 0; q < weights.size(); ++q) v += weights[q] * b[q];
        return v;
    };
    c.negated = j.value("negated", false);
    c.name = j.value("name", type);
    return c;
}

/// {"composition": single|conjunction|disjunction, "alpha0": a, "components": [...]}
/// A bare component object is accepted as a single barrier.
inline BarrierSpec<Belief> barrier_spec_from_json(const nlohmann::json& j, std::size_t num_states,
                                                  std::optional<double> alpha0_override = std::nullopt) {
    try {
        const double alpha0 = alpha0_override ? *alpha0_override : j.at("alpha0").get<double>();
        std::vector<BarrierComponent<Belief>> comps;
        Composition comp = Composition::Single;
        if (j.contains("components")) {
            for (const auto& c : j.at("components")) comps.push_back(barrier_component_from_json(c, num_states));
            comp = composition_from_string(j.value("composition", comps.size() == 1 ? "single" : "conjunction"));
        } else {
            comps.push_back(barrier_component_from_json(j, num_states));
        }
        return BarrierSpec<Belief>(std::move(comps), comp, KappaFn::constant(alpha0));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidBarrierConfig(std::string("malformed barrier config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InvalidBarrierConfig(e.what());
    }
}

}  // namespace safe_mpomdp
