#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "belief.hpp"
#include "joint_space.hpp"
#include "rng.hpp"

namespace safe_mpomdp {

inline constexpr double kStochasticTolerance = 1e-9;
inline constexpr double kImpossibleObservationCutoff = 1e-12;

class ImpossibleObservation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidModel : public std::runtime_error {
public:
    InvalidModel(const std::string& what, std::vector<std::string> violations)
        : std::runtime_error(what), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Multi-agent POMDP in dense tabular form.
///
/// transition[q][a][q']  = P(q' | q, a)
/// observation[q'][a][z] = P(z | q', a)
/// reward[q][a]
///
/// Joint actions and observations are dense mixed-radix indices (agent 0 most
/// significant). The model is immutable once validated.
struct MpomdpModel {
    using Tensor3 = std::vector<std::vector<std::vector<double>>>;
    using Matrix = std::vector<std::vector<double>>;

    std::vector<std::string> agents;
    std::vector<std::string> states;
    std::vector<double> initial_belief;
    std::vector<std::vector<std::string>> actions;       // per agent
    std::vector<std::vector<std::string>> observations;  // per agent
    Tensor3 transition;
    Tensor3 observation;
    Matrix reward;

    std::size_t num_states() const { return states.size(); }

    MixedRadix action_space() const { return MixedRadix(sizes(actions)); }
    MixedRadix observation_space() const { return MixedRadix(sizes(observations)); }

    std::size_t num_joint_actions() const { return product(actions); }
    std::size_t num_joint_observations() const { return product(observations); }

    Belief initial() const { return Belief(initial_belief); }

private:
    static std::vector<std::size_t> sizes(const std::vector<std::vector<std::string>>& sets) {
        std::vector<std::size_t> out;
        for (const auto& s : sets) out.push_back(s.size());
        return out;
    }
    static std::size_t product(const std::vector<std::vector<std::string>>& sets) {
        if (sets.empty()) return 0;
        std::size_t n = 1;
        for (const auto& s : sets) n *= s.size();
        return n;
    }
};

namespace detail {
template <class... Args>
std::string concat(const Args&... args) {
    std::ostringstream os;
    (os << ... << args);
    return os.str();
}
}  // namespace detail

/// Every structural or stochasticity defect of the model; empty means valid.
inline std::vector<std::string> validate_model(const MpomdpModel& m) {
    using detail::concat;
    std::vector<std::string> out;

    if (m.agents.empty()) out.push_back("agent set is empty");
    if (m.states.empty()) out.push_back("state set is empty");
    if (m.actions.size() != m.agents.size())
        out.push_back(concat("expected ", m.agents.size(), " action sets, got ", m.actions.size()));
    if (m.observations.size() != m.agents.size())
        out.push_back(concat("expected ", m.agents.size(), " observation sets, got ", m.observations.size()));
    for (std::size_t i = 0; i < m.actions.size(); ++i)
        if (m.actions[i].empty()) out.push_back(concat("action set of agent ", i, " is empty"));
    for (std::size_t i = 0; i < m.observations.size(); ++i)
        if (m.observations[i].empty()) out.push_back(concat("observation set of agent ", i, " is empty"));
    if (!out.empty()) return out;

    const std::size_t nq = m.num_states();
    const std::size_t na = m.num_joint_actions();
    const std::size_t nz = m.num_joint_observations();

    if (m.initial_belief.size() != nq) {
        out.push_back(concat("initial_belief has ", m.initial_belief.size(), " entries, expected ", nq));
    } else {
        double s = 0.0;
        for (std::size_t q = 0; q < nq; ++q) {
            if (m.initial_belief[q] < 0.0) out.push_back(concat("initial_belief[", q, "] is negative"));
            s += m.initial_belief[q];
        }
        if (std::abs(s - 1.0) > kStochasticTolerance) out.push_back(concat("initial_belief sums to ", s));
    }

    if (m.transition.size() != nq) {
        out.push_back(concat("transition has ", m.transition.size(), " source states, expected ", nq));
    } else {
        for (std::size_t q = 0; q < nq; ++q) {
            if (m.transition[q].size() != na) {
                out.push_back(concat("transition[", q, "] has ", m.transition[q].size(), " actions, expected ", na));
                continue;
            }
            for (std::size_t a = 0; a < na; ++a) {
                const auto& row = m.transition[q][a];
                if (row.size() != nq) {
                    out.push_back(concat("transition row (q=", q, ", a=", a, ") has ", row.size(), " entries"));
                    continue;
                }
                double s = 0.0;
                for (std::size_t q2 = 0; q2 < nq; ++q2) {
                    if (row[q2] < 0.0 || row[q2] > 1.0)
                        out.push_back(concat("transition (q=", q, ", a=", a, ", q'=", q2, ") = ", row[q2], " outside [0,1]"));
                    s += row[q2];
                }
                if (std::abs(s - 1.0) > kStochasticTolerance)
                    out.push_back(concat("transition row (q=", q, ", a=", a, ") sums to ", s));
            }
        }
    }

    if (m.observation.size() != nq) {
        out.push_back(concat("observation_fn has ", m.observation.size(), " states, expected ", nq));
    } else {
        for (std::size_t q2 = 0; q2 < nq; ++q2) {
            if (m.observation[q2].size() != na) {
                out.push_back(concat("observation_fn[", q2, "] has ", m.observation[q2].size(), " actions, expected ", na));
                continue;
            }
            for (std::size_t a = 0; a < na; ++a) {
                const auto& row = m.observation[q2][a];
                if (row.size() != nz) {
                    out.push_back(concat("observation row (q'=", q2, ", a=", a, ") has ", row.size(), " entries"));
                    continue;
                }
                double s = 0.0;
                for (std::size_t z = 0; z < nz; ++z) {
                    if (row[z] < 0.0 || row[z] > 1.0)
                        out.push_back(concat("observation (q'=", q2, ", a=", a, ", z=", z, ") = ", row[z], " outside [0,1]"));
                    s += row[z];
                }
                if (std::abs(s - 1.0) > kStochasticTolerance)
                    out.push_back(concat("observation row (q'=", q2, ", a=", a, ") sums to ", s));
            }
        }
    }

    if (m.reward.size() != nq) {
        out.push_back(concat("reward has ", m.reward.size(), " states, expected ", nq));
    } else {
        for (std::size_t q = 0; q < nq; ++q)
            if (m.reward[q].size() != na)
                out.push_back(concat("reward[", q, "] has ", m.reward[q].size(), " actions, expected ", na));
    }
    return out;
}

inline void require_valid(const MpomdpModel& m) {
    auto v = validate_model(m);
    if (v.empty()) return;
    const std::string what = "invalid model: " + v.front();
    throw InvalidModel(what, std::move(v));
}

inline std::vector<JointAction> enumerate_joint_actions(const MpomdpModel& m) { return enumerate(m.action_space()); }

namespace detail {
// Unnormalized posterior O(q',a,z) * sum_q T(q,a,q') b(q); returns the normalizer.
inline double unnormalized_posterior(const MpomdpModel& m, const Belief& prev, std::size_t a, std::size_t z,
                                     std::vector<double>& out) {
    const std::size_t nq = m.num_states();
    out.assign(nq, 0.0);
    for (std::size_t q = 0; q < nq; ++q) {
        const double bq = prev[q];
        if (bq == 0.0) continue;
        const auto& row = m.transition[q][a];
        for (std::size_t q2 = 0; q2 < nq; ++q2) out[q2] += row[q2] * bq;
    }
    double norm = 0.0;
    for (std::size_t q2 = 0; q2 < nq; ++q2) {
        out[q2] *= m.observation[q2][a][z];
        norm += out[q2];
    }
    return norm;
}
}  // namespace detail

/// P(z | a, b): the normalizer of the Bayes filter.
inline double observation_likelihood(const MpomdpModel& m, const Belief& prev, const JointAction& a,
                                     const JointObservation& z) {
    std::vector<double> scratch;
    return detail::unnormalized_posterior(m, prev, a.index, z.index, scratch);
}

/// Bayes filter step; std::nullopt when z has (numerically) zero likelihood.
inline std::optional<Belief> try_belief_update(const MpomdpModel& m, const Belief& prev, const JointAction& a,
                                               const JointObservation& z) {
    std::vector<double> post;
    const double norm = detail::unnormalized_posterior(m, prev, a.index, z.index, post);
    if (!(norm > kImpossibleObservationCutoff)) return std::nullopt;
    for (double& p : post) p /= norm;
    return Belief(std::move(post));
}

inline Belief belief_update(const MpomdpModel& m, const Belief& prev, const JointAction& a, const JointObservation& z) {
    auto next = try_belief_update(m, prev, a, z);
    if (!next) {
        throw ImpossibleObservation(detail::concat("observation ", z.index, " has zero likelihood under action ",
                                                   a.index));
    }
    return std::move(*next);
}

inline double expected_reward(const MpomdpModel& m, const Belief& b, const JointAction& a) {
    double r = 0.0;
    for (std::size_t q = 0; q < m.num_states(); ++q) r += b[q] * m.reward[q][a.index];
    return r;
}

struct SampledStep {
    std::size_t next_state;
    JointObservation observation;
};

inline JointObservation sample_observation(const MpomdpModel& m, std::size_t state, const JointAction& a, Rng& rng) {
    const std::size_t z = rng.categorical(m.observation.at(state).at(a.index));
    return JointObservation::from_index(m.observation_space(), z);
}

inline SampledStep sample_step(const MpomdpModel& m, std::size_t true_state, const JointAction& a, Rng& rng) {
    const std::size_t next = rng.categorical(m.transition.at(true_state).at(a.index));
    return {next, sample_observation(m, next, a, rng)};
}

}  // namespace safe_mpomdp
