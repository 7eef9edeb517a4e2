#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "planner.hpp"
#include "rng.hpp"

namespace safe_mpomdp {

enum class MissionOutcome { Success, Failure, HorizonExceeded, SafetyDeadlock };
enum class WorldStatus { Continue, Success, Failure };

inline std::string to_string(MissionOutcome o) {
    switch (o) {
        case MissionOutcome::Success: return "Success";
        case MissionOutcome::Failure: return "Failure";
        case MissionOutcome::HorizonExceeded: return "HorizonExceeded";
        case MissionOutcome::SafetyDeadlock: return "SafetyDeadlock";
    }
    return "?";
}

enum class DeadlockPolicy { Abort, Stay };

/// Ground-truth side of a closed-loop run.
template <class W>
concept World = requires(W& w, const W& cw, const JointAction& a, Rng& rng) {
    typename W::observation_type;
    typename W::state_type;
    { w.observe_initial(rng) } -> std::same_as<typename W::observation_type>;
    { w.execute(a, rng) } -> std::same_as<typename W::observation_type>;
    { cw.status() } -> std::same_as<WorldStatus>;
    { cw.state() } -> std::convertible_to<typename W::state_type>;
};

template <class B, class Z>
using Planner = std::function<PlanDecision<B>(const B&, const Z&)>;

struct MissionConfig {
    std::size_t horizon = 100;
    DeadlockPolicy deadlock_policy = DeadlockPolicy::Abort;
    std::size_t stay_action = 0;  // joint index executed under DeadlockPolicy::Stay
    bool keep_candidate_beliefs = false;
};

template <class B, class Z, class S>
struct MissionResult {
    std::vector<B> beliefs;                 // b^0 .. b^T
    std::vector<PlanDecision<B>> decisions; // one per executed step
    std::vector<Z> observations;            // observation used at step t (0-based)
    std::vector<S> states;                  // true state before step 1, then after each step
    MissionOutcome outcome = MissionOutcome::HorizonExceeded;
    std::optional<std::string> deadlock_reason;
};

/// Closed loop: the world yields an observation, the planner picks the joint
/// action from (previous belief, observation), the planner's posterior becomes
/// the new belief, and the world executes the action. Stops at the horizon or
/// when the world reports a terminal status. Deterministic given the seed.
template <PlanningModel M, World W>
MissionResult<typename M::belief_type, typename W::observation_type, typename W::state_type> run_mission(
    const M& model, const Planner<typename M::belief_type, typename W::observation_type>& planner, W& world,
    typename M::belief_type initial_belief, const MissionConfig& config, Rng& rng) {
    using B = typename M::belief_type;
    if (config.horizon == 0) throw std::invalid_argument("horizon must be at least 1");

    MissionResult<B, typename W::observation_type, typename W::state_type> result;
    result.beliefs.push_back(std::move(initial_belief));
    result.states.push_back(world.state());

    auto terminal = [&](WorldStatus s) -> std::optional<MissionOutcome> {
        if (s == WorldStatus::Success) return MissionOutcome::Success;
        if (s == WorldStatus::Failure) return MissionOutcome::Failure;
        return std::nullopt;
    };
    if (auto o = terminal(world.status())) {
        result.outcome = *o;
        return result;
    }

    auto z = world.observe_initial(rng);
    for (std::size_t t = 1; t <= config.horizon; ++t) {
        const B& b_prev = result.beliefs.back();
        std::optional<PlanDecision<B>> decision;
        try {
            decision = planner(b_prev, z);
        } catch (const PlanningError& e) {
            if (config.deadlock_policy == DeadlockPolicy::Abort) {
                result.outcome = MissionOutcome::SafetyDeadlock;
                result.deadlock_reason = e.what();
                return result;
            }
            const MixedRadix space = model.action_space();
            PlanDecision<B> d;
            d.chosen = JointAction::from_index(space, config.stay_action);
            auto ev = model.bind(b_prev, z)(d.chosen);
            if (!ev) {
                result.outcome = MissionOutcome::SafetyDeadlock;
                result.deadlock_reason = e.what();
                return result;
            }
            CandidateRecord<B> rec;
            rec.action = d.chosen;
            rec.feasible = true;
            rec.reward = ev->reward;
            d.next_belief = std::move(ev->belief);
            d.overridden = true;
            d.candidates.push_back(std::move(rec));
            decision = std::move(d);
        }

        if (!config.keep_candidate_beliefs)
            for (auto& c : decision->candidates) c.belief.reset();

        result.observations.push_back(z);
        result.beliefs.push_back(decision->next_belief);
        const JointAction action = decision->chosen;
        result.decisions.push_back(std::move(*decision));

        z = world.execute(action, rng);
        result.states.push_back(world.state());
        if (auto o = terminal(world.status())) {
            result.outcome = *o;
            return result;
        }
    }
    result.outcome = MissionOutcome::HorizonExceeded;
    return result;
}

}  // namespace safe_mpomdp
