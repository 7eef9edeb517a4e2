#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "mission.hpp"
#include "model.hpp"
#include "planner.hpp"

namespace safe_mpomdp {

/// Planning view of a tabular model: posterior by the exact Bayes filter,
/// reward as the expectation of R under the posterior.
class FlatPlanningModel {
public:
    using belief_type = Belief;
    using observation_type = JointObservation;

    explicit FlatPlanningModel(const MpomdpModel& model) : model_(&model), space_(model.action_space()) {}

    const MixedRadix& action_space() const { return space_; }
    const MpomdpModel& model() const { return *model_; }

    auto bind(const Belief& b_prev, const JointObservation& z) const {
        return [this, &b_prev, &z](const JointAction& a) -> std::optional<Evaluation<Belief>> {
            auto next = try_belief_update(*model_, b_prev, a, z);
            if (!next) return std::nullopt;
            const double r = expected_reward(*model_, *next, a);
            return Evaluation<Belief>{std::move(*next), r};
        };
    }

private:
    const MpomdpModel* model_;
    MixedRadix space_;
};

/// Ground truth for a tabular model, stepped with sample_step. The first
/// observation is drawn at the initial state under joint action 0.
class FlatWorld {
public:
    using observation_type = JointObservation;
    using state_type = std::size_t;

    FlatWorld(const MpomdpModel& model, std::size_t initial_state, std::vector<std::size_t> success_states = {},
              std::vector<std::size_t> failure_states = {})
        : model_(&model),
          state_(initial_state),
          success_(std::move(success_states)),
          failure_(std::move(failure_states)) {}

    JointObservation observe_initial(Rng& rng) {
        return sample_observation(*model_, state_, JointAction::from_index(model_->action_space(), 0), rng);
    }

    JointObservation execute(const JointAction& a, Rng& rng) {
        auto step = sample_step(*model_, state_, a, rng);
        state_ = step.next_state;
        return step.observation;
    }

    WorldStatus status() const {
        auto has = [this](const std::vector<std::size_t>& v) { return std::find(v.begin(), v.end(), state_) != v.end(); };
        if (has(failure_)) return WorldStatus::Failure;
        if (has(success_)) return WorldStatus::Success;
        return WorldStatus::Continue;
    }

    std::size_t state() const { return state_; }

private:
    const MpomdpModel* model_;
    std::size_t state_;
    std::vector<std::size_t> success_;
    std::vector<std::size_t> failure_;
};

static_assert(PlanningModel<FlatPlanningModel>);
static_assert(World<FlatWorld>);

}  // namespace safe_mpomdp
