#pragma once

// Subcommands of the safe_mpomdp tool. Each returns the process exit code and
// writes human-readable output to the given stream.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "barrier_io.hpp"
#include "dtbf.hpp"
#include "flat_adapter.hpp"
#include "gridworld.hpp"
#include "gridworld_io.hpp"
#include "mission.hpp"
#include "model_io.hpp"
#include "planner.hpp"
#include "trace.hpp"

namespace safe_mpomdp::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

inline constexpr const char* kOutDirEnv = "SAFE_MPOMDP_OUT";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Algorithm { Greedy, PerAgent, Filter, Nominal };

inline Algorithm algorithm_from_string(const std::string& s) {
    if (s == "greedy") return Algorithm::Greedy;
    if (s == "per-agent") return Algorithm::PerAgent;
    if (s == "filter") return Algorithm::Filter;
    if (s == "nominal") return Algorithm::Nominal;
    throw ConfigError("unknown algorithm '" + s + "'");
}

inline std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Greedy: return "greedy";
        case Algorithm::PerAgent: return "per-agent";
        case Algorithm::Filter: return "filter";
        case Algorithm::Nominal: return "nominal";
    }
    return "?";
}

struct Overrides {
    std::optional<std::string> algorithm;
    std::optional<std::size_t> horizon;
    std::optional<double> theta;
    std::optional<double> alpha0;
};

/// A parsed scenario document: either the grid exploration scenario or a
/// tabular model (a document with a "model" key).
struct LoadedScenario {
    Algorithm algorithm = Algorithm::Filter;
    std::size_t horizon = 200;
    std::uint64_t base_seed = 0;
    MissionConfig mission;

    std::optional<grid::ExplorationScenario> grid;

    std::optional<MpomdpModel> model;
    std::optional<BarrierSpec<Belief>> flat_barrier;
    std::size_t true_initial_state = 0;
    std::vector<std::size_t> success_states;
    std::vector<std::size_t> failure_states;
    nlohmann::json nominal;

    double alpha0() const {
        if (grid) return grid->alpha0();
        return *flat_barrier->kappa().constant_rate();
    }
};

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline LoadedScenario load_scenario(const nlohmann::json& doc, const Overrides& ov = {}) {
    LoadedScenario s;
    try {
        if (doc.contains("planner")) {
            const auto& p = doc.at("planner");
            if (p.contains("algorithm")) s.algorithm = algorithm_from_string(p.at("algorithm").get<std::string>());
            s.horizon = p.value("horizon", s.horizon);
            s.base_seed = p.value("seed", s.base_seed);
            const auto policy = p.value("deadlock_policy", std::string("abort"));
            if (policy == "abort") {
                s.mission.deadlock_policy = DeadlockPolicy::Abort;
            } else if (policy == "stay") {
                s.mission.deadlock_policy = DeadlockPolicy::Stay;
            } else {
                throw ConfigError("unknown deadlock policy '" + policy + "'");
            }
        }
        if (ov.algorithm) s.algorithm = algorithm_from_string(*ov.algorithm);
        if (ov.horizon) s.horizon = *ov.horizon;
        if (s.horizon == 0) throw ConfigError("horizon must be at least 1");
        s.mission.horizon = s.horizon;

        if (doc.contains("model")) {
            s.model = model_from_json(doc.at("model"));
            const auto n = s.model->num_states();
            if (!doc.contains("barrier")) throw ConfigError("tabular scenario needs a barrier");
            s.flat_barrier = barrier_spec_from_json(doc.at("barrier"), n, ov.alpha0);
            s.true_initial_state = doc.value("true_initial_state", std::size_t{0});
            if (s.true_initial_state >= n) throw ConfigError("true_initial_state out of range");
            s.success_states = doc.value("success_states", std::vector<std::size_t>{});
            s.failure_states = doc.value("failure_states", std::vector<std::size_t>{});
            s.nominal = doc.value("nominal", nlohmann::json::object());
        } else {
            auto config = grid::scenario_config_from_json(doc);
            if (ov.theta) config.theta = *ov.theta;
            if (ov.alpha0) config.alpha0 = *ov.alpha0;
            s.grid.emplace(std::move(config));
        }
    } catch (const grid::InvalidConfig& e) {
        throw ConfigError(e.what());
    } catch (const InvalidModel& e) {
        throw ConfigError(e.what());
    } catch (const InvalidBarrierConfig& e) {
        throw ConfigError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed scenario: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

inline LoadedScenario load_scenario_file(const std::string& path, const Overrides& ov = {}) {
    return load_scenario(read_json_file(path), ov);
}

// ---------------------------------------------------------------------------
// Serialization of beliefs, actions and observations

inline ordered_json grid_action_json(const JointAction& a) {
    ordered_json j;
    for (std::size_t r = 0; r < grid::kRobots; ++r) j[grid::kRobotNames[r]] = grid::kMoveNames[a.parts[r]];
    return j;
}

inline ordered_json grid_observation_json(const grid::GridObservation& z) {
    ordered_json j;
    ordered_json loc = ordered_json::object();
    for (std::size_t r = 0; r < grid::kRobots; ++r)
        if (z.location[r]) loc[grid::kRobotNames[r]] = *z.location[r];
    j["location"] = loc;
    ordered_json readings = ordered_json::array();
    for (const auto& rd : z.readings)
        readings.push_back({grid::kRobotNames[grid::idx(rd.observer)], rd.cell,
                            rd.feature == grid::Feature::Habitable ? "habitable" : "sample", rd.value ? 1 : 0});
    j["readings"] = readings;
    if (z.segway_operational) j["segway_operational"] = *z.segway_operational;
    return j;
}

inline ordered_json grid_belief_json(const grid::FactoredBelief& b) {
    ordered_json j;
    for (std::size_t r = 0; r < grid::kRobots; ++r) j["location"][grid::kRobotNames[r]] = b.location[r];
    j["habitable"] = b.habitable;
    j["sample"] = b.sample;
    return j;
}

inline ordered_json grid_state_json(const grid::ScenarioState& s) {
    ordered_json j;
    for (std::size_t r = 0; r < grid::kRobots; ++r) j[grid::kRobotNames[r]] = s.cells[r];
    return j;
}

inline ordered_json flat_names_json(const MpomdpModel& m, const std::vector<std::vector<std::string>>& names,
                                    const std::vector<std::size_t>& parts) {
    ordered_json j;
    for (std::size_t i = 0; i < m.agents.size(); ++i) j[m.agents[i]] = names[i][parts[i]];
    return j;
}

// ---------------------------------------------------------------------------
// Running one seed

struct SeedResult {
    std::uint64_t seed = 0;
    MissionOutcome outcome = MissionOutcome::HorizonExceeded;
    std::size_t steps = 0;
    std::vector<std::size_t> intervention_steps;
    std::size_t violations = 0;
    std::vector<double> h_values;
    std::optional<std::string> deadlock_reason;
};

namespace detail {

struct TraceFormat {
    std::function<ordered_json(const JointAction&)> action;
    bool emit_beliefs = false;
};

template <class B, class Z, class S, class BeliefJson, class ObsJson, class StateJson, class HFn>
SeedResult write_mission(std::ostream& out, const MissionResult<B, Z, S>& result, ordered_json header,
                         const KappaFn& kappa, HFn&& h, const TraceFormat& fmt, BeliefJson&& belief_json,
                         ObsJson&& obs_json, StateJson&& state_json, const char* state_key) {
    SeedResult sr;
    sr.outcome = result.outcome;
    sr.steps = result.decisions.size();
    sr.deadlock_reason = result.deadlock_reason;
    const std::string final_outcome = to_string(result.outcome);

    double h_prev = h(result.beliefs.front());
    sr.h_values.push_back(h_prev);
    header["h_value"] = h_prev;
    header["outcome"] = final_outcome;
    header[state_key] = state_json(result.states.front());
    if (fmt.emit_beliefs) header["belief"] = belief_json(result.beliefs.front());
    write_record(out, header);

    for (std::size_t t = 0; t < result.decisions.size(); ++t) {
        const auto& d = result.decisions[t];
        const double h_next = h(result.beliefs[t + 1]);
        const auto cond = dtbf_condition_values(kappa, h_prev, h_next);
        if (!cond.satisfied) ++sr.violations;
        if (d.intervened) sr.intervention_steps.push_back(t + 1);
        sr.h_values.push_back(h_next);

        ordered_json rec;
        rec["t"] = t + 1;
        rec["action"] = fmt.action(d.chosen);
        rec["joint_action"] = d.chosen.index;
        rec["observations"] = obs_json(result.observations[t]);
        rec["h_value"] = h_next;
        rec["margin"] = cond.margin;
        rec["safe"] = cond.satisfied;
        rec["intervened"] = d.intervened;
        if (d.nominal) rec["nominal_action"] = fmt.action(*d.nominal);
        double reward = 0.0;
        for (const auto& c : d.candidates)
            if (c.action.index == d.chosen.index) reward = c.reward;
        rec["expected_reward"] = reward;
        if (d.overridden) rec["overridden"] = true;
        rec[state_key] = state_json(result.states[t + 1]);
        rec["outcome"] = t + 1 == result.decisions.size() ? final_outcome : std::string("Continue");
        if (fmt.emit_beliefs) rec["belief"] = belief_json(result.beliefs[t + 1]);
        write_record(out, rec);
        h_prev = h_next;
    }
    if (result.deadlock_reason) {
        ordered_json ev;
        ev["event"] = "deadlock";
        ev["t"] = result.decisions.size() + 1;
        ev["reason"] = *result.deadlock_reason;
        ev["outcome"] = final_outcome;
        write_record(out, ev);
    }
    return sr;
}

inline ordered_json base_header(const LoadedScenario& s, std::uint64_t seed) {
    ordered_json h;
    h["t"] = 0;
    h["algorithm"] = to_string(s.algorithm);
    h["seed"] = seed;
    h["horizon"] = s.horizon;
    h["alpha0"] = s.alpha0();
    if (s.grid) h["theta"] = s.grid->theta();
    return h;
}

inline SeedResult run_grid(const LoadedScenario& s, std::uint64_t seed, bool emit_beliefs, std::ostream& out) {
    using namespace grid;
    const auto& sc = *s.grid;
    ExplorationPlanningModel model(sc);
    ExplorationWorld world(sc);
    const auto spec = segway_barrier_spec(sc);
    const auto barriers = agent_barriers(sc);

    Planner<FactoredBelief, GridObservation> planner = [&](const FactoredBelief& b, const GridObservation& z) {
        // The nominal policy acts on the belief corrected by the received observation.
        NominalPolicy<FactoredBelief> nominal = [&](const FactoredBelief& bb) {
            auto corrected = try_condition(bb, sc, z);
            return unsafe_nominal_policy(corrected ? *corrected : bb, sc);
        };
        switch (s.algorithm) {
            case Algorithm::Greedy: return safe_greedy_action(model, spec, b, z);
            case Algorithm::PerAgent: return per_agent_safe_greedy_action(model, barriers, b, z);
            case Algorithm::Filter: return safety_filter_action(model, spec, nominal, b, z);
            case Algorithm::Nominal: return unfiltered_nominal_action(model, spec, nominal, b, z);
        }
        throw std::logic_error("unknown algorithm");
    };

    Rng rng(seed);
    const auto result = run_mission(model, planner, world, mission_initial_belief(sc), s.mission, rng);

    auto header = base_header(s, seed);
    TraceFormat fmt{grid_action_json, emit_beliefs};
    auto sr = write_mission(
        out, result, header, spec.kappa(), [&](const FactoredBelief& b) { return barrier_value(spec, b); }, fmt,
        grid_belief_json, grid_observation_json, grid_state_json, "true_cells");
    sr.seed = seed;
    return sr;
}

inline NominalPolicy<Belief> flat_nominal(const LoadedScenario& s) {
    const auto& m = *s.model;
    const auto& j = s.nominal;
    const std::size_t n_actions = m.num_joint_actions();
    if (j.contains("constant")) {
        const auto a = j.at("constant").get<std::size_t>();
        if (a >= n_actions) throw ConfigError("nominal action out of range");
        return [space = m.action_space(), a](const Belief&) { return JointAction::from_index(space, a); };
    }
    if (j.contains("by_state")) {
        // Action listed for the most likely state; ties go to the lowest state.
        auto table = j.at("by_state").get<std::vector<std::size_t>>();
        if (table.size() != m.num_states()) throw ConfigError("nominal by_state table has the wrong length");
        for (auto a : table)
            if (a >= n_actions) throw ConfigError("nominal action out of range");
        return [space = m.action_space(), table](const Belief& b) {
            const auto& p = b.probs();
            const auto q = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
            return JointAction::from_index(space, table[q]);
        };
    }
    throw ConfigError("filter and nominal algorithms need a nominal policy (constant or by_state)");
}

inline SeedResult run_flat(const LoadedScenario& s, std::uint64_t seed, bool emit_beliefs, std::ostream& out) {
    const auto& m = *s.model;
    const auto& spec = *s.flat_barrier;
    FlatPlanningModel model(m);
    FlatWorld world(m, s.true_initial_state, s.success_states, s.failure_states);

    std::vector<AgentBarrier<Belief>> barriers;
    for (std::size_t i = 0; i < spec.components().size(); ++i)
        barriers.push_back({i, [](const Belief& b) { return b; },
                            [&spec, i](const Belief& b) { return spec.component_value(i, b); }, spec.kappa()});

    std::optional<NominalPolicy<Belief>> nominal;
    if (s.algorithm == Algorithm::Filter || s.algorithm == Algorithm::Nominal) nominal = flat_nominal(s);

    Planner<Belief, JointObservation> planner = [&](const Belief& b, const JointObservation& z) {
        switch (s.algorithm) {
            case Algorithm::Greedy: return safe_greedy_action(model, spec, b, z);
            case Algorithm::PerAgent: return per_agent_safe_greedy_action(model, barriers, b, z);
            case Algorithm::Filter: return safety_filter_action(model, spec, *nominal, b, z);
            case Algorithm::Nominal: return unfiltered_nominal_action(model, spec, *nominal, b, z);
        }
        throw std::logic_error("unknown algorithm");
    };

    Rng rng(seed);
    const auto result = run_mission(model, planner, world, m.initial(), s.mission, rng);

    TraceFormat fmt{[&m](const JointAction& a) { return flat_names_json(m, m.actions, a.parts); }, emit_beliefs};
    auto sr = write_mission(
        out, result, base_header(s, seed), spec.kappa(), [&](const Belief& b) { return barrier_value(spec, b); },
        fmt, [](const Belief& b) { return ordered_json(b.probs()); },
        [&m](const JointObservation& z) { return flat_names_json(m, m.observations, z.parts); },
        [&m](std::size_t q) { return ordered_json(m.states[q]); }, "true_state");
    sr.seed = seed;
    return sr;
}

}  // namespace detail

/// Runs one mission and writes its JSONL trace to `out`.
inline SeedResult run_seed(const LoadedScenario& s, std::uint64_t seed, bool emit_beliefs, std::ostream& out) {
    if (s.grid) return detail::run_grid(s, seed, emit_beliefs, out);
    return detail::run_flat(s, seed, emit_beliefs, out);
}

// ---------------------------------------------------------------------------
// Summaries

struct RunSummary {
    std::string algorithm;
    std::vector<std::uint64_t> seeds;
    std::array<std::size_t, 4> outcome_counts{};  // indexed by MissionOutcome
    std::size_t total_steps = 0;
    std::size_t interventions = 0;
    std::size_t runs_with_interventions = 0;
    std::size_t runs_with_violations = 0;
    std::optional<double> mean_steps_to_success;
    double min_h = std::numeric_limits<double>::infinity();
    std::vector<SeedResult> runs;

    std::size_t count(MissionOutcome o) const { return outcome_counts[static_cast<std::size_t>(o)]; }
    double intervention_rate() const {
        return total_steps == 0 ? 0.0 : static_cast<double>(interventions) / static_cast<double>(total_steps);
    }

    void add(SeedResult r) {
        seeds.push_back(r.seed);
        ++outcome_counts[static_cast<std::size_t>(r.outcome)];
        total_steps += r.steps;
        interventions += r.intervention_steps.size();
        if (!r.intervention_steps.empty()) ++runs_with_interventions;
        if (r.violations > 0) ++runs_with_violations;
        for (double h : r.h_values) min_h = std::min(min_h, h);
        std::size_t successes = 0;
        double success_steps = 0.0;
        runs.push_back(std::move(r));
        for (const auto& run : runs)
            if (run.outcome == MissionOutcome::Success) {
                ++successes;
                success_steps += static_cast<double>(run.steps);
            }
        if (successes > 0) mean_steps_to_success = success_steps / static_cast<double>(successes);
    }

    ordered_json to_json() const {
        ordered_json j;
        j["algorithm"] = algorithm;
        j["seeds"] = seeds.size();
        ordered_json counts;
        for (auto o : {MissionOutcome::Success, MissionOutcome::Failure, MissionOutcome::HorizonExceeded,
                       MissionOutcome::SafetyDeadlock})
            counts[safe_mpomdp::to_string(o)] = count(o);
        j["outcomes"] = counts;
        j["intervention_rate"] = intervention_rate();
        j["runs_with_interventions"] = runs_with_interventions;
        j["runs_with_violations"] = runs_with_violations;
        if (mean_steps_to_success) {
            j["mean_steps_to_success"] = *mean_steps_to_success;
        } else {
            j["mean_steps_to_success"] = nullptr;
        }
        j["min_h"] = seeds.empty() ? ordered_json(nullptr) : ordered_json(min_h);
        return j;
    }
};

struct RunRequest {
    std::string scenario;
    Overrides overrides;
    std::optional<std::size_t> seeds;   // seeds base .. base + n - 1
    std::optional<std::uint64_t> seed;  // single seed
    std::optional<std::string> out_dir;
    bool emit_beliefs = false;
};

inline std::string resolve_out_dir(const std::optional<std::string>& requested) {
    if (requested) return *requested;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return "traces";
}

inline std::vector<std::uint64_t> seed_list(const LoadedScenario& s, const RunRequest& req) {
    if (req.seed) return {*req.seed};
    const std::size_t n = req.seeds.value_or(1);
    if (n == 0) throw ConfigError("--seeds must be at least 1");
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(s.base_seed + i);
    return out;
}

inline std::string trace_name(Algorithm a, std::uint64_t seed) {
    return to_string(a) + "_seed" + std::to_string(seed) + ".jsonl";
}

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

inline void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("cannot write " + path.string());
}

inline RunSummary run_batch(const LoadedScenario& s, const std::vector<std::uint64_t>& seeds, const fs::path& dir,
                            bool emit_beliefs) {
    RunSummary summary;
    summary.algorithm = to_string(s.algorithm);
    for (auto seed : seeds) {
        std::ostringstream trace;
        auto r = run_seed(s, seed, emit_beliefs, trace);
        write_text_file(dir / trace_name(s.algorithm, seed), trace.str());
        summary.add(std::move(r));
    }
    return summary;
}

inline int cmd_run(const RunRequest& req, std::ostream& out, std::ostream& err) {
    try {
        const auto s = load_scenario_file(req.scenario, req.overrides);
        const auto seeds = seed_list(s, req);
        const fs::path dir = resolve_out_dir(req.out_dir);
        ensure_dir(dir);
        const auto summary = run_batch(s, seeds, dir, req.emit_beliefs);
        const auto text = summary.to_json().dump(2);
        write_text_file(dir / ("summary_" + summary.algorithm + ".json"), text + "\n");
        out << text << '\n';
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
}

struct VerifyRequest {
    std::string trace;
    std::optional<double> alpha0;
    std::optional<std::string> scenario;  // recompute h from recorded beliefs
};

inline int cmd_verify(const VerifyRequest& req, std::ostream& out, std::ostream& err) {
    std::ifstream in(req.trace);
    if (!in) {
        err << "error: cannot open " << req.trace << '\n';
        return kExitIo;
    }
    ParsedTrace trace;
    try {
        trace = parse_trace(in);
    } catch (const MalformedTrace& e) {
        err << "error: malformed trace: " << e.what() << '\n';
        return kExitConfig;
    }

    std::optional<double> alpha0 = req.alpha0 ? req.alpha0 : trace.alpha0();
    std::vector<double> values = trace.h_values;
    if (req.scenario) {
        try {
            const auto s = load_scenario_file(*req.scenario, Overrides{.alpha0 = req.alpha0});
            if (!req.alpha0) alpha0 = s.alpha0();
            std::vector<ordered_json> records{trace.header};
            records.insert(records.end(), trace.steps.begin(), trace.steps.end());
            values.clear();
            for (const auto& rec : records) {
                if (!rec.contains("belief")) throw ConfigError("trace records carry no beliefs (run with --emit-beliefs)");
                const auto& bj = rec.at("belief");
                if (s.grid) {
                    grid::FactoredBelief b;
                    for (std::size_t r = 0; r < grid::kRobots; ++r)
                        b.location[r] = bj.at("location").at(grid::kRobotNames[r]).get<std::vector<double>>();
                    b.habitable = bj.at("habitable").get<std::vector<double>>();
                    b.sample = bj.at("sample").get<std::vector<double>>();
                    values.push_back(grid::segway_safety_barrier(b, *s.grid));
                } else {
                    values.push_back(barrier_value(*s.flat_barrier, Belief(bj.get<std::vector<double>>())));
                }
            }
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << '\n';
            return kExitConfig;
        } catch (const IoError& e) {
            err << "error: " << e.what() << '\n';
            return kExitIo;
        } catch (const nlohmann::json::exception& e) {
            err << "error: malformed belief record: " << e.what() << '\n';
            return kExitConfig;
        }
    }
    if (!alpha0) {
        err << "error: trace has no alpha0; pass --alpha0\n";
        return kExitConfig;
    }
    std::optional<KappaFn> kappa;
    try {
        kappa = KappaFn::constant(*alpha0);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    const auto report = verify_barrier_values(values, *kappa);
    out << render_report(report);
    return report.violation_count() == 0 ? kExitOk : kExitViolations;
}

struct CompareRequest {
    std::string scenario;
    Overrides overrides;
    std::optional<std::size_t> seeds;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool emit_beliefs = false;
};

inline int cmd_compare(const CompareRequest& req, std::ostream& out, std::ostream& err) {
    try {
        auto nominal = load_scenario_file(req.scenario, req.overrides);
        auto filtered = nominal;
        nominal.algorithm = Algorithm::Nominal;
        filtered.algorithm = Algorithm::Filter;
        RunRequest seeds_req;
        seeds_req.seeds = req.seeds;
        seeds_req.seed = req.seed;
        const auto seeds = seed_list(nominal, seeds_req);
        const fs::path dir = resolve_out_dir(req.out_dir);
        ensure_dir(dir);

        const auto a = run_batch(nominal, seeds, dir, req.emit_beliefs);
        const auto b = run_batch(filtered, seeds, dir, req.emit_beliefs);

        ordered_json j;
        j["nominal"] = a.to_json();
        j["filtered"] = b.to_json();
        ordered_json pairs = ordered_json::array();
        std::ostringstream csv;
        csv.precision(17);
        csv << "seed,t,h_nominal,h_filtered\n";
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            const auto& rn = a.runs[i];
            const auto& rf = b.runs[i];
            ordered_json p;
            p["seed"] = seeds[i];
            p["nominal_outcome"] = safe_mpomdp::to_string(rn.outcome);
            p["filtered_outcome"] = safe_mpomdp::to_string(rf.outcome);
            p["nominal_violations"] = rn.violations;
            p["filtered_violations"] = rf.violations;
            p["intervention_steps"] = rf.intervention_steps;
            pairs.push_back(p);
            const std::size_t len = std::max(rn.h_values.size(), rf.h_values.size());
            for (std::size_t t = 0; t < len; ++t) {
                csv << seeds[i] << ',' << t << ',';
                if (t < rn.h_values.size()) csv << rn.h_values[t];
                csv << ',';
                if (t < rf.h_values.size()) csv << rf.h_values[t];
                csv << '\n';
            }
        }
        j["pairs"] = pairs;
        const auto text = j.dump(2);
        write_text_file(dir / "compare.json", text + "\n");
        write_text_file(dir / "compare.csv", csv.str());
        out << text << '\n';
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
}

}  // namespace safe_mpomdp::cli
