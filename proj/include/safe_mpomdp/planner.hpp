#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "belief.hpp"
#include "dtbf.hpp"
#include "joint_space.hpp"

namespace safe_mpomdp {

/// Posterior belief and expected immediate reward of one candidate action.
template <class B>
struct Evaluation {
    B belief;
    double reward = 0.0;
};

/// A planning model exposes its joint action space and, for a fixed
/// (previous belief, received observation) pair, an evaluator mapping each
/// candidate joint action to its posterior and reward. The evaluator returns
/// std::nullopt when the observation is impossible under that action.
template <class M>
concept PlanningModel = requires(const M& m, const typename M::belief_type& b,
                                 const typename M::observation_type& z, const JointAction& a) {
    typename M::belief_type;
    typename M::observation_type;
    { m.action_space() } -> std::convertible_to<MixedRadix>;
    { m.bind(b, z)(a) } -> std::same_as<std::optional<Evaluation<typename M::belief_type>>>;
};

class PlanningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoSafeAction : public PlanningError {
public:
    NoSafeAction() : PlanningError("no candidate joint action satisfies the barrier condition") {}
};

class ImpossibleObservationForAll : public PlanningError {
public:
    ImpossibleObservationForAll() : PlanningError("observation has zero likelihood under every joint action") {}
};

template <class B>
struct CandidateRecord {
    JointAction action;
    bool feasible = false;  // observation possible under this action
    bool safe = false;
    double margin = 0.0;    // worst margin over the checked conditions
    double h_next = 0.0;
    double reward = 0.0;
    std::optional<B> belief;
};

template <class B>
struct PlanDecision {
    JointAction chosen;
    B next_belief;
    std::vector<CandidateRecord<B>> candidates;
    double h_prev = 0.0;
    bool intervened = false;              // filter replaced the nominal action
    std::optional<JointAction> nominal;   // filter only
    std::optional<double> nominal_reward; // filter only
    bool overridden = false;              // deadlock fallback executed without certification

    const CandidateRecord<B>& chosen_record() const {
        for (const auto& c : candidates)
            if (c.action.index == chosen.index) return c;
        throw std::logic_error("chosen action missing from candidates");
    }
};

template <class B>
using NominalPolicy = std::function<JointAction(const B&)>;

/// Safety requirement of a single agent: a barrier over the marginal belief
/// of the states that concern that agent.
template <class B>
struct AgentBarrier {
    std::size_t agent = 0;
    std::function<Belief(const B&)> marginal;
    std::function<double(const Belief&)> h;
    KappaFn kappa;
};

namespace detail {

struct SafetyVerdict {
    bool safe;
    double margin;
    double h_next;
};

// Walks every joint action in index order and records posterior, verdict and
// reward. Throws ImpossibleObservationForAll when no candidate is feasible.
template <PlanningModel M, class Check>
std::vector<CandidateRecord<typename M::belief_type>> evaluate_candidates(const M& model,
                                                                           const typename M::belief_type& b_prev,
                                                                           const typename M::observation_type& z,
                                                                           Check&& check) {
    using B = typename M::belief_type;
    const MixedRadix space = model.action_space();
    auto evaluate = model.bind(b_prev, z);
    std::vector<CandidateRecord<B>> out;
    out.reserve(space.size());
    bool any_feasible = false;
    for (std::size_t i = 0; i < space.size(); ++i) {
        CandidateRecord<B> rec;
        rec.action = JointAction::from_index(space, i);
        if (auto ev = evaluate(rec.action)) {
            any_feasible = true;
            rec.feasible = true;
            const SafetyVerdict v = check(ev->belief);
            rec.safe = v.safe;
            rec.margin = v.margin;
            rec.h_next = v.h_next;
            rec.reward = ev->reward;
            rec.belief = std::move(ev->belief);
        }
        out.push_back(std::move(rec));
    }
    if (!any_feasible) throw ImpossibleObservationForAll();
    return out;
}

template <class B>
std::size_t argmax_safe_reward(const std::vector<CandidateRecord<B>>& cands) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (!cands[i].safe) continue;
        if (!best || cands[i].reward > cands[*best].reward) best = i;
    }
    if (!best) throw NoSafeAction();
    return *best;
}

template <class B>
PlanDecision<B> decide(std::vector<CandidateRecord<B>> cands, std::size_t pick, double h_prev) {
    PlanDecision<B> d;
    d.chosen = cands[pick].action;
    d.next_belief = *cands[pick].belief;
    d.h_prev = h_prev;
    d.candidates = std::move(cands);
    return d;
}

}  // namespace detail

/// One-step greedy safe planner: among the joint actions whose posterior
/// keeps the barrier condition, the one of largest expected reward at the
/// posterior. Ties go to the lowest joint index.
template <PlanningModel M>
PlanDecision<typename M::belief_type> safe_greedy_action(const M& model,
                                                         const BarrierSpec<typename M::belief_type>& spec,
                                                         const typename M::belief_type& b_prev,
                                                         const typename M::observation_type& z) {
    const double h_prev = barrier_value(spec, b_prev);
    auto cands = detail::evaluate_candidates(model, b_prev, z, [&](const auto& b_next) {
        const auto c = dtbf_condition_values(spec.kappa(), h_prev, barrier_value(spec, b_next));
        return detail::SafetyVerdict{c.satisfied, c.margin, c.h_next};
    });
    const std::size_t pick = detail::argmax_safe_reward(cands);
    return detail::decide(std::move(cands), pick, h_prev);
}

/// As safe_greedy_action, but every agent barrier must hold on its own
/// marginal. The recorded margin is the smallest over agents; h values are
/// those of the first barrier.
template <PlanningModel M>
PlanDecision<typename M::belief_type> per_agent_safe_greedy_action(
    const M& model, const std::vector<AgentBarrier<typename M::belief_type>>& barriers,
    const typename M::belief_type& b_prev, const typename M::observation_type& z) {
    if (barriers.empty()) throw std::invalid_argument("per-agent planner needs at least one agent barrier");
    std::vector<double> h_prev;
    for (const auto& ab : barriers) h_prev.push_back(ab.h(ab.marginal(b_prev)));

    auto cands = detail::evaluate_candidates(model, b_prev, z, [&](const auto& b_next) {
        detail::SafetyVerdict v{true, std::numeric_limits<double>::infinity(), 0.0};
        for (std::size_t k = 0; k < barriers.size(); ++k) {
            const auto& ab = barriers[k];
            const auto c = dtbf_condition_values(ab.kappa, h_prev[k], ab.h(ab.marginal(b_next)));
            v.safe = v.safe && c.satisfied;
            v.margin = std::min(v.margin, c.margin);
            if (k == 0) v.h_next = c.h_next;
        }
        return v;
    });
    const std::size_t pick = detail::argmax_safe_reward(cands);
    return detail::decide(std::move(cands), pick, h_prev.front());
}

/// Safety filter over a nominal policy. The nominal action passes through
/// when its posterior satisfies the barrier condition; otherwise the safe
/// joint action whose expected reward is closest (squared deviation) to the
/// nominal one is returned.
template <PlanningModel M>
PlanDecision<typename M::belief_type> safety_filter_action(const M& model,
                                                           const BarrierSpec<typename M::belief_type>& spec,
                                                           const NominalPolicy<typename M::belief_type>& nominal,
                                                           const typename M::belief_type& b_prev,
                                                           const typename M::observation_type& z) {
    using B = typename M::belief_type;
    const double h_prev = barrier_value(spec, b_prev);
    const MixedRadix space = model.action_space();
    const JointAction a_n = nominal(b_prev);
    if (a_n.index >= space.size()) throw std::out_of_range("nominal policy returned an invalid joint action");

    CandidateRecord<B> nominal_rec;
    nominal_rec.action = JointAction::from_index(space, a_n.index);
    if (auto ev = model.bind(b_prev, z)(nominal_rec.action)) {
        const auto c = dtbf_condition_values(spec.kappa(), h_prev, barrier_value(spec, ev->belief));
        nominal_rec.feasible = true;
        nominal_rec.safe = c.satisfied;
        nominal_rec.margin = c.margin;
        nominal_rec.h_next = c.h_next;
        nominal_rec.reward = ev->reward;
        nominal_rec.belief = std::move(ev->belief);
    }

    if (nominal_rec.safe) {
        PlanDecision<B> d;
        d.chosen = nominal_rec.action;
        d.next_belief = *nominal_rec.belief;
        d.h_prev = h_prev;
        d.nominal = nominal_rec.action;
        d.nominal_reward = nominal_rec.reward;
        d.candidates.push_back(std::move(nominal_rec));
        return d;
    }

    auto cands = detail::evaluate_candidates(model, b_prev, z, [&](const auto& b_next) {
        const auto c = dtbf_condition_values(spec.kappa(), h_prev, barrier_value(spec, b_next));
        return detail::SafetyVerdict{c.satisfied, c.margin, c.h_next};
    });

    std::size_t pick = 0;
    if (nominal_rec.feasible) {
        const double r_n = nominal_rec.reward;
        std::optional<std::size_t> best;
        double best_dev = 0.0;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (!cands[i].safe) continue;
            const double dev = (cands[i].reward - r_n) * (cands[i].reward - r_n);
            if (!best || dev < best_dev) {
                best = i;
                best_dev = dev;
            }
        }
        if (!best) throw NoSafeAction();
        pick = *best;
    } else {
        // Nominal reward undefined when its observation is impossible.
        pick = detail::argmax_safe_reward(cands);
    }

    auto d = detail::decide(std::move(cands), pick, h_prev);
    d.intervened = true;
    d.nominal = nominal_rec.action;
    if (nominal_rec.feasible) d.nominal_reward = nominal_rec.reward;
    return d;
}

/// Executes the nominal policy with no filtering; the barrier condition is
/// still evaluated and recorded for the chosen action.
template <PlanningModel M>
PlanDecision<typename M::belief_type> unfiltered_nominal_action(const M& model,
                                                                const BarrierSpec<typename M::belief_type>& spec,
                                                                const NominalPolicy<typename M::belief_type>& nominal,
                                                                const typename M::belief_type& b_prev,
                                                                const typename M::observation_type& z) {
    using B = typename M::belief_type;
    const MixedRadix space = model.action_space();
    CandidateRecord<B> rec;
    rec.action = JointAction::from_index(space, nominal(b_prev).index);
    auto ev = model.bind(b_prev, z)(rec.action);
    if (!ev) throw ImpossibleObservationForAll();
    const double h_prev = barrier_value(spec, b_prev);
    const auto c = dtbf_condition_values(spec.kappa(), h_prev, barrier_value(spec, ev->belief));
    rec.feasible = true;
    rec.safe = c.satisfied;
    rec.margin = c.margin;
    rec.h_next = c.h_next;
    rec.reward = ev->reward;
    rec.belief = std::move(ev->belief);

    PlanDecision<B> d;
    d.chosen = rec.action;
    d.next_belief = *rec.belief;
    d.h_prev = h_prev;
    d.nominal = rec.action;
    d.nominal_reward = rec.reward;
    d.candidates.push_back(std::move(rec));
    return d;
}

}  // namespace safe_mpomdp
