#pragma once

// Heterogeneous-robot exploration on an n x m grid: a UAV and a Flipper map
// the environment while a Segway, which cannot sense anything itself, drives
// to the sample. The joint belief is kept in factored form: one location
// distribution per robot plus independent per-cell Bernoulli beliefs for
// habitability and sample presence.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "belief.hpp"
#include "dtbf.hpp"
#include "joint_space.hpp"
#include "mission.hpp"
#include "model.hpp"
#include "planner.hpp"
#include "rng.hpp"

namespace safe_mpomdp::grid {

enum class Robot : std::size_t { Uav = 0, Flipper = 1, Segway = 2 };
inline constexpr std::size_t kRobots = 3;
inline constexpr std::array<const char*, kRobots> kRobotNames = {"uav", "flipper", "segway"};

enum class Move : std::size_t { Stay = 0, Forward, Backward, Left, Right };
inline constexpr std::size_t kMoves = 5;
inline constexpr std::array<const char*, kMoves> kMoveNames = {"stay", "forward", "backward", "left", "right"};
// forward decreases the row index, right increases the column index
inline constexpr std::array<int, kMoves> kMoveRow = {0, -1, 1, 0, 0};
inline constexpr std::array<int, kMoves> kMoveCol = {0, 0, 0, -1, 1};

// Cells whose habitability belief is below this are treated as believed
// uninhabitable by the reward's danger term and by path planning.
inline constexpr double kLowHabitability = 0.5;
// Per-step discount of the sample attraction potential along a path.
inline constexpr double kAttractionDecay = 0.75;

constexpr std::size_t idx(Robot r) { return static_cast<std::size_t>(r); }

struct Cell {
    int row = 0;
    int col = 0;
    bool operator==(const Cell&) const = default;
};

class InvalidConfig : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SensorModel {
    int radius = -1;  // Chebyshev radius; negative means no sensing
    double habitable_accuracy = 0.5;
    double sample_accuracy = 0.5;
};

struct RewardWeights {
    double info_habitable = 1.0;
    double info_sample = 1.0;
    double sample_attract = 10.0;
    double danger = 10.0;
};

struct ScenarioConfig {
    int rows = 10;
    int cols = 10;
    std::array<Cell, kRobots> starts{Cell{9, 0}, Cell{9, 1}, Cell{9, 2}};
    std::vector<std::string> habitable_map;  // rows of '.'/'#'; empty = all habitable
    std::optional<Cell> sample;
    std::array<SensorModel, kRobots> sensing{SensorModel{2, 0.6, 0.9}, SensorModel{1, 0.9, 0.6}, SensorModel{}};
    double p_succ = 0.85;
    double theta = 0.95;
    double alpha0 = 0.3;
    std::optional<double> flipper_theta;
    RewardWeights weights;
};

/// Validated scenario with ground truth and precomputed motion kernels.
class ExplorationScenario {
public:
    struct Outcome {
        int cell;
        double prob;
    };

    explicit ExplorationScenario(ScenarioConfig config) : config_(std::move(config)) {
        const auto& c = config_;
        if (c.rows < 2 || c.cols < 2) throw InvalidConfig("grid must be at least 2x2");
        if (!(c.p_succ > 0.0 && c.p_succ <= 1.0)) throw InvalidConfig("p_succ must lie in (0, 1]");
        if (!(c.theta > 0.0 && c.theta < 1.0)) throw InvalidConfig("theta must lie in (0, 1)");
        if (!(c.alpha0 > 0.0 && c.alpha0 < 1.0)) throw InvalidConfig("alpha0 must lie in (0, 1)");
        if (c.flipper_theta && !(*c.flipper_theta > 0.0 && *c.flipper_theta < 1.0))
            throw InvalidConfig("flipper theta must lie in (0, 1)");
        for (const auto& s : c.sensing)
            if (s.habitable_accuracy < 0.0 || s.habitable_accuracy > 1.0 || s.sample_accuracy < 0.0 ||
                s.sample_accuracy > 1.0)
                throw InvalidConfig("sensor accuracies must lie in [0, 1]");

        habitable_.assign(cell_count(), true);
        if (!c.habitable_map.empty()) {
            if (c.habitable_map.size() != static_cast<std::size_t>(c.rows))
                throw InvalidConfig("habitable map has the wrong number of rows");
            for (int r = 0; r < c.rows; ++r) {
                const auto& line = c.habitable_map[r];
                if (line.size() != static_cast<std::size_t>(c.cols))
                    throw InvalidConfig("habitable map row " + std::to_string(r) + " has the wrong width");
                for (int col = 0; col < c.cols; ++col) {
                    const char ch = line[col];
                    if (ch == '.' || ch == '1') continue;
                    if (ch == '#' || ch == '0') {
                        habitable_[index(Cell{r, col})] = false;
                        continue;
                    }
                    throw InvalidConfig(std::string("unknown habitable map symbol '") + ch + "'");
                }
            }
        }
        if (!c.sample) throw InvalidConfig("scenario has no sample cell");
        if (!in_grid(*c.sample)) throw InvalidConfig("sample cell is outside the grid");
        if (!habitable_[index(*c.sample)]) throw InvalidConfig("sample cell must be habitable");
        for (std::size_t r = 0; r < kRobots; ++r) {
            if (!in_grid(c.starts[r])) throw InvalidConfig(std::string(kRobotNames[r]) + " start is outside the grid");
            if (!habitable_[index(c.starts[r])])
                throw InvalidConfig(std::string(kRobotNames[r]) + " start cell must be habitable");
        }

        kernels_.resize(cell_count() * kMoves);
        for (int cell = 0; cell < static_cast<int>(cell_count()); ++cell)
            for (std::size_t m = 0; m < kMoves; ++m) kernels_[cell * kMoves + m] = build_kernel(cell, static_cast<Move>(m));
    }

    const ScenarioConfig& config() const { return config_; }
    int rows() const { return config_.rows; }
    int cols() const { return config_.cols; }
    std::size_t cell_count() const { return static_cast<std::size_t>(config_.rows * config_.cols); }
    double theta() const { return config_.theta; }
    double alpha0() const { return config_.alpha0; }
    const SensorModel& sensor(Robot r) const { return config_.sensing[idx(r)]; }
    const RewardWeights& weights() const { return config_.weights; }

    bool in_grid(Cell c) const { return c.row >= 0 && c.row < config_.rows && c.col >= 0 && c.col < config_.cols; }
    int index(Cell c) const { return c.row * config_.cols + c.col; }
    Cell cell(int index) const { return Cell{index / config_.cols, index % config_.cols}; }

    bool habitable(int cell) const { return habitable_[cell]; }
    int sample_cell() const { return index(*config_.sample); }
    int start_cell(Robot r) const { return index(config_.starts[idx(r)]); }

    MixedRadix action_space() const { return MixedRadix({kMoves, kMoves, kMoves}); }

    /// Landing distribution for a move from a cell. The intended cell is
    /// reached with p_succ, otherwise one of its 8 neighbours uniformly;
    /// off-grid outcomes are dropped and the rest renormalized. Staying, or
    /// pushing against the grid boundary, leaves the robot in place.
    const std::vector<Outcome>& motion(int from, Move m) const { return kernels_[from * kMoves + static_cast<std::size_t>(m)]; }

    static int chebyshev(Cell a, Cell b) { return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)); }

private:
    std::vector<Outcome> build_kernel(int from, Move m) const {
        const Cell c = cell(from);
        const Cell target{c.row + kMoveRow[static_cast<std::size_t>(m)], c.col + kMoveCol[static_cast<std::size_t>(m)]};
        if (m == Move::Stay || !in_grid(target)) return {{from, 1.0}};
        std::vector<Outcome> out{{index(target), config_.p_succ}};
        const double slip = (1.0 - config_.p_succ) / 8.0;
        if (slip > 0.0) {
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const Cell n{target.row + dr, target.col + dc};
                    if (in_grid(n)) out.push_back({index(n), slip});
                }
        }
        double total = 0.0;
        for (const auto& o : out) total += o.prob;
        for (auto& o : out) o.prob /= total;
        return out;
    }

    ScenarioConfig config_;
    std::vector<bool> habitable_;
    std::vector<std::vector<Outcome>> kernels_;
};

struct FactoredBelief {
    std::array<std::vector<double>, kRobots> location;
    std::vector<double> habitable;
    std::vector<double> sample;

    bool operator==(const FactoredBelief&) const = default;
};

enum class Feature { Habitable, Sample };

struct CellReading {
    Robot observer;
    int cell;
    Feature feature;
    bool value;
    bool operator==(const CellReading&) const = default;
};

/// What the team shares after an action completes: each robot's position fix,
/// the binary detections of the sensing robots, and whether the Segway is
/// still operational (it is not once it has entered an uninhabitable cell).
struct GridObservation {
    std::array<std::optional<int>, kRobots> location;
    std::vector<CellReading> readings;
    std::optional<bool> segway_operational;
    bool operator==(const GridObservation&) const = default;
};

struct ScenarioState {
    std::array<int, kRobots> cells{};
    bool operator==(const ScenarioState&) const = default;
};

inline FactoredBelief initial_belief(const ExplorationScenario& s) {
    FactoredBelief b;
    for (std::size_t r = 0; r < kRobots; ++r) {
        b.location[r].assign(s.cell_count(), 0.0);
        b.location[r][s.start_cell(static_cast<Robot>(r))] = 1.0;
    }
    b.habitable.assign(s.cell_count(), 0.5);
    b.sample.assign(s.cell_count(), 0.5);
    return b;
}

struct BuiltScenario {
    ExplorationScenario scenario;
    FactoredBelief belief;
};

inline BuiltScenario build_scenario(ScenarioConfig config) {
    ExplorationScenario s(std::move(config));
    auto b = initial_belief(s);
    return {std::move(s), std::move(b)};
}

inline JointAction joint_action(const ExplorationScenario& s, Move uav, Move flipper, Move segway) {
    return JointAction::from_parts(s.action_space(), {static_cast<std::size_t>(uav), static_cast<std::size_t>(flipper),
                                                      static_cast<std::size_t>(segway)});
}

inline Move move_of(const JointAction& a, Robot r) { return static_cast<Move>(a.parts.at(idx(r))); }

// ---------------------------------------------------------------------------
// Ground truth

inline GridObservation sense(const ExplorationScenario& s, const ScenarioState& state, Rng& rng) {
    GridObservation z;
    for (std::size_t r = 0; r < kRobots; ++r) z.location[r] = state.cells[r];
    for (std::size_t r = 0; r < kRobots; ++r) {
        const auto& sensor = s.config().sensing[r];
        if (sensor.radius < 0) continue;
        const Cell at = s.cell(state.cells[r]);
        for (int row = at.row - sensor.radius; row <= at.row + sensor.radius; ++row)
            for (int col = at.col - sensor.radius; col <= at.col + sensor.radius; ++col) {
                const Cell c{row, col};
                if (!s.in_grid(c)) continue;
                const int ci = s.index(c);
                const bool hab = s.habitable(ci);
                const bool smp = ci == s.sample_cell();
                const bool hab_read = rng.bernoulli(sensor.habitable_accuracy) ? hab : !hab;
                const bool smp_read = rng.bernoulli(sensor.sample_accuracy) ? smp : !smp;
                z.readings.push_back({static_cast<Robot>(r), ci, Feature::Habitable, hab_read});
                z.readings.push_back({static_cast<Robot>(r), ci, Feature::Sample, smp_read});
            }
    }
    z.segway_operational = s.habitable(state.cells[idx(Robot::Segway)]);
    return z;
}

struct WorldStep {
    ScenarioState state;
    GridObservation observation;
};

/// Moves every robot independently through its motion kernel, then senses.
inline WorldStep step_world(const ExplorationScenario& s, const ScenarioState& state, const JointAction& a, Rng& rng) {
    WorldStep out;
    for (std::size_t r = 0; r < kRobots; ++r) {
        const auto& kernel = s.motion(state.cells[r], move_of(a, static_cast<Robot>(r)));
        std::vector<double> w;
        w.reserve(kernel.size());
        for (const auto& o : kernel) w.push_back(o.prob);
        out.state.cells[r] = kernel[rng.categorical(w)].cell;
    }
    out.observation = sense(s, out.state, rng);
    return out;
}

inline WorldStatus check_termination(const ScenarioState& state, const ExplorationScenario& s) {
    const int segway = state.cells[idx(Robot::Segway)];
    if (!s.habitable(segway)) return WorldStatus::Failure;
    if (segway == s.sample_cell()) return WorldStatus::Success;
    return WorldStatus::Continue;
}

// ---------------------------------------------------------------------------
// Factored filter

inline double binary_bayes(double prior, double accuracy, bool reading) {
    const double like_true = reading ? accuracy : 1.0 - accuracy;
    const double like_false = reading ? 1.0 - accuracy : accuracy;
    const double norm = like_true * prior + like_false * (1.0 - prior);
    if (!(norm > kImpossibleObservationCutoff)) throw ImpossibleObservation("cell reading has zero likelihood");
    return like_true * prior / norm;
}

/// Conditions the belief on an observation without moving anyone.
inline std::optional<FactoredBelief> try_condition(const FactoredBelief& b, const ExplorationScenario& s,
                                                   const GridObservation& z) {
    FactoredBelief out = b;
    for (std::size_t r = 0; r < kRobots; ++r) {
        if (!z.location[r]) continue;
        const int at = *z.location[r];
        if (!(out.location[r][at] > kImpossibleObservationCutoff)) return std::nullopt;
        std::fill(out.location[r].begin(), out.location[r].end(), 0.0);
        out.location[r][at] = 1.0;
    }
    for (const auto& rd : z.readings) {
        const auto& sensor = s.sensor(rd.observer);
        auto& p = rd.feature == Feature::Habitable ? out.habitable[rd.cell] : out.sample[rd.cell];
        const double acc = rd.feature == Feature::Habitable ? sensor.habitable_accuracy : sensor.sample_accuracy;
        try {
            p = binary_bayes(p, acc, rd.value);
        } catch (const ImpossibleObservation&) {
            return std::nullopt;
        }
    }
    // Survival of the Segway reveals that the cell it occupies is habitable.
    // Only applied with a position fix, where the update stays exact.
    const auto seg = idx(Robot::Segway);
    if (z.segway_operational && *z.segway_operational && z.location[seg]) {
        const int at = *z.location[seg];
        if (!(out.habitable[at] > kImpossibleObservationCutoff)) return std::nullopt;
        out.habitable[at] = 1.0;
    }
    return out;
}

inline std::vector<double> predict_location(const std::vector<double>& loc, const ExplorationScenario& s, Move m) {
    std::vector<double> out(loc.size(), 0.0);
    for (std::size_t c = 0; c < loc.size(); ++c) {
        if (loc[c] == 0.0) continue;
        for (const auto& o : s.motion(static_cast<int>(c), m)) out[o.cell] += loc[c] * o.prob;
    }
    double total = 0.0;
    for (double p : out) total += p;
    for (double& p : out) p /= total;
    return out;
}

inline void predict_in_place(FactoredBelief& b, const ExplorationScenario& s, const JointAction& a) {
    for (std::size_t r = 0; r < kRobots; ++r) b.location[r] = predict_location(b.location[r], s, move_of(a, static_cast<Robot>(r)));
}

/// Conditions on the observation (position fixes, detections, Segway
/// survival), then pushes each location belief through the motion kernel of
/// the robot's action. Unobserved cells keep their beliefs.
inline FactoredBelief update_factored_belief(const FactoredBelief& b, const ExplorationScenario& s,
                                             const JointAction& a, const GridObservation& z) {
    auto out = try_condition(b, s, z);
    if (!out) throw ImpossibleObservation("observation has zero likelihood under the factored belief");
    predict_in_place(*out, s, a);
    return std::move(*out);
}

// ---------------------------------------------------------------------------
// Safety

/// Predicted probability that the robot occupies a habitable cell, minus theta.
inline double habitability_barrier(const FactoredBelief& b, Robot r, double theta) {
    double p = 0.0;
    const auto& loc = b.location[idx(r)];
    for (std::size_t c = 0; c < loc.size(); ++c) p += loc[c] * b.habitable[c];
    return p - theta;
}

inline double segway_safety_barrier(const FactoredBelief& b, const ExplorationScenario& s) {
    return habitability_barrier(b, Robot::Segway, s.theta());
}

inline BarrierSpec<FactoredBelief> segway_barrier_spec(const ExplorationScenario& s) {
    return BarrierSpec<FactoredBelief>::single(
        [&s](const FactoredBelief& b) { return segway_safety_barrier(b, s); }, KappaFn::constant(s.alpha0()),
        "segway-habitable");
}

/// Marginal over (cell, habitable) pairs of one robot: entry 2c+1 is
/// P(at c, c habitable), entry 2c is P(at c, c uninhabitable).
inline Belief habitability_marginal(const FactoredBelief& b, Robot r) {
    const auto& loc = b.location[idx(r)];
    std::vector<double> m(2 * loc.size());
    for (std::size_t c = 0; c < loc.size(); ++c) {
        m[2 * c + 1] = loc[c] * b.habitable[c];
        m[2 * c] = loc[c] * (1.0 - b.habitable[c]);
    }
    return Belief(std::move(m));
}

inline double habitable_mass_barrier(const Belief& marginal, double theta) {
    double p = 0.0;
    for (std::size_t i = 1; i < marginal.size(); i += 2) p += marginal[i];
    return p - theta;
}

/// Segway requirement, plus the Flipper's when the scenario sets one.
inline std::vector<AgentBarrier<FactoredBelief>> agent_barriers(const ExplorationScenario& s) {
    auto make = [&](Robot r, double theta) {
        return AgentBarrier<FactoredBelief>{
            idx(r), [r](const FactoredBelief& b) { return habitability_marginal(b, r); },
            [theta](const Belief& m) { return habitable_mass_barrier(m, theta); }, KappaFn::constant(s.alpha0())};
    };
    std::vector<AgentBarrier<FactoredBelief>> out{make(Robot::Segway, s.theta())};
    if (s.config().flipper_theta) out.push_back(make(Robot::Flipper, *s.config().flipper_theta));
    return out;
}

// ---------------------------------------------------------------------------
// Reward

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

/// Expected entropy reduction of one Bernoulli belief from a single reading.
inline double expected_information_gain(double p, double accuracy) {
    const double h0 = binary_entropy(p);
    if (h0 == 0.0) return 0.0;
    const double p_yes = accuracy * p + (1.0 - accuracy) * (1.0 - p);
    double expected = 0.0;
    if (p_yes > 0.0) expected += p_yes * binary_entropy(accuracy * p / p_yes);
    if (p_yes < 1.0) expected += (1.0 - p_yes) * binary_entropy((1.0 - accuracy) * p / (1.0 - p_yes));
    return std::max(0.0, h0 - expected);
}

/// Discounted potential max_d source(d) * decay^D(c, d), with D the
/// 4-connected path length. Paths only continue out of cells that pass
/// `passable`; cells with zero source value are not sources.
inline std::vector<double> decayed_potential(const std::vector<double>& source, const ExplorationScenario& s,
                                             const std::function<bool(int)>& passable) {
    const std::size_t n = s.cell_count();
    const double step_cost = -std::log(kAttractionDecay);
    std::vector<double> cost(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    for (std::size_t c = 0; c < n; ++c) {
        if (source[c] <= 0.0) continue;
        cost[c] = -std::log(source[c]);
        open.emplace(cost[c], static_cast<int>(c));
    }
    while (!open.empty()) {
        const auto [d, c] = open.top();
        open.pop();
        if (d > cost[c]) continue;
        if (!passable(c)) continue;  // reachable, but not passable
        const Cell at = s.cell(c);
        for (std::size_t m = 1; m < kMoves; ++m) {
            const Cell nb{at.row + kMoveRow[m], at.col + kMoveCol[m]};
            if (!s.in_grid(nb)) continue;
            const int ni = s.index(nb);
            if (d + step_cost < cost[ni]) {
                cost[ni] = d + step_cost;
                open.emplace(cost[ni], ni);
            }
        }
    }
    std::vector<double> phi(n);
    for (std::size_t c = 0; c < n; ++c) phi[c] = std::exp(-cost[c]);
    return phi;
}

/// Sample attraction of each cell for the Segway; paths avoid cells believed
/// uninhabitable.
inline std::vector<double> sample_potential(const FactoredBelief& b, const ExplorationScenario& s) {
    return decayed_potential(b.sample, s, [&](int c) { return b.habitable[c] >= kLowHabitability; });
}

/// Candidate-independent part of the exploration reward for one belief.
class RewardField {
public:
    RewardField(const FactoredBelief& b, const ExplorationScenario& s) : scenario_(&s) {
        const std::size_t n = s.cell_count();
        flipper_info_ = footprint_gain(b.habitable, s.sensor(Robot::Flipper).radius,
                                       s.sensor(Robot::Flipper).habitable_accuracy);
        uav_info_ = footprint_gain(b.sample, s.sensor(Robot::Uav).radius, s.sensor(Robot::Uav).sample_accuracy);
        attraction_ = sample_potential(b, s);
        low_.resize(n);
        for (std::size_t c = 0; c < n; ++c) low_[c] = b.habitable[c] < kLowHabitability ? 1.0 : 0.0;
    }

    double flipper_info(int cell) const { return flipper_info_[cell]; }
    double uav_info(int cell) const { return uav_info_[cell]; }
    double attraction(int cell) const { return attraction_[cell]; }

    /// Weighted reward for post-action location beliefs.
    double evaluate(const std::array<std::vector<double>, kRobots>& location) const {
        const auto& w = scenario_->weights();
        return w.info_habitable * expect(location[idx(Robot::Flipper)], flipper_info_) +
               w.info_sample * expect(location[idx(Robot::Uav)], uav_info_) +
               w.sample_attract * expect(location[idx(Robot::Segway)], attraction_) -
               w.danger * expect(location[idx(Robot::Segway)], low_);
    }

private:
    static double expect(const std::vector<double>& p, const std::vector<double>& f) {
        double v = 0.0;
        for (std::size_t c = 0; c < p.size(); ++c)
            if (p[c] != 0.0) v += p[c] * f[c];
        return v;
    }

    std::vector<double> footprint_gain(const std::vector<double>& probs, int radius, double accuracy) const {
        const auto& s = *scenario_;
        std::vector<double> gain(probs.size());
        for (std::size_t c = 0; c < probs.size(); ++c) gain[c] = expected_information_gain(probs[c], accuracy);
        std::vector<double> out(probs.size(), 0.0);
        if (radius < 0) return out;
        for (std::size_t c = 0; c < probs.size(); ++c) {
            const Cell at = s.cell(static_cast<int>(c));
            for (int row = at.row - radius; row <= at.row + radius; ++row)
                for (int col = at.col - radius; col <= at.col + radius; ++col)
                    if (s.in_grid({row, col})) out[c] += gain[s.index({row, col})];
        }
        return out;
    }

    const ExplorationScenario* scenario_;
    std::vector<double> flipper_info_;
    std::vector<double> uav_info_;
    std::vector<double> attraction_;
    std::vector<double> low_;
};

/// Information gain of the Flipper (habitability) and the UAV (sample) over
/// their predicted sensing footprints, attraction of the Segway towards
/// likely sample cells, and a penalty on its predicted mass on cells believed
/// uninhabitable. `b` is the belief at decision time; locations are pushed
/// through the motion kernels of `a`.
inline double exploration_reward(const FactoredBelief& b, const ExplorationScenario& s, const JointAction& a) {
    std::array<std::vector<double>, kRobots> loc;
    for (std::size_t r = 0; r < kRobots; ++r) loc[r] = predict_location(b.location[r], s, move_of(a, static_cast<Robot>(r)));
    return RewardField(b, s).evaluate(loc);
}

// ---------------------------------------------------------------------------
// Nominal policy

inline int mode_cell(const std::vector<double>& loc) {
    return static_cast<int>(std::max_element(loc.begin(), loc.end()) - loc.begin());
}

/// First move of a shortest 4-connected path from `from` to `to` whose cells
/// pass `passable` (the goal itself always may be entered). Ties go to the
/// lowest move index. Stay when unreachable or already there.
inline Move first_step_towards(const ExplorationScenario& s, int from, int to,
                               const std::function<bool(int)>& passable) {
    if (from == to) return Move::Stay;
    const std::size_t n = s.cell_count();
    std::vector<int> dist(n, -1);
    std::queue<int> q;
    dist[to] = 0;
    q.push(to);
    while (!q.empty()) {
        const int c = q.front();
        q.pop();
        if (c != to && !passable(c)) continue;
        const Cell at = s.cell(c);
        for (std::size_t m = 1; m < kMoves; ++m) {
            const Cell nb{at.row + kMoveRow[m], at.col + kMoveCol[m]};
            if (!s.in_grid(nb)) continue;
            const int ni = s.index(nb);
            if (dist[ni] >= 0) continue;
            dist[ni] = dist[c] + 1;
            q.push(ni);
        }
    }
    if (dist[from] < 0) return Move::Stay;
    const Cell at = s.cell(from);
    for (std::size_t m = 1; m < kMoves; ++m) {
        const Cell nb{at.row + kMoveRow[m], at.col + kMoveCol[m]};
        if (!s.in_grid(nb)) continue;
        const int ni = s.index(nb);
        if (dist[ni] == dist[from] - 1 && (ni == to || passable(ni))) return static_cast<Move>(m);
    }
    return Move::Stay;
}

/// Greedy move of a sensing robot on the discounted potential of its
/// footprint information gain, so that it keeps heading for unexplored
/// regions once its surroundings are known.
inline Move information_greedy_move(const FactoredBelief& b, const ExplorationScenario& s, Robot r,
                                    const RewardField& field) {
    std::vector<double> gain(s.cell_count());
    for (std::size_t c = 0; c < gain.size(); ++c)
        gain[c] = r == Robot::Flipper ? field.flipper_info(static_cast<int>(c)) : field.uav_info(static_cast<int>(c));
    const auto phi = decayed_potential(gain, s, [](int) { return true; });
    Move best = Move::Stay;
    double best_value = -1.0;
    for (std::size_t m = 0; m < kMoves; ++m) {
        const auto loc = predict_location(b.location[idx(r)], s, static_cast<Move>(m));
        double v = 0.0;
        for (std::size_t c = 0; c < loc.size(); ++c)
            if (loc[c] != 0.0) v += loc[c] * phi[c];
        if (v > best_value + 1e-12) {
            best_value = v;
            best = static_cast<Move>(m);
        }
    }
    return best;
}

/// Nominal team policy that ignores the probabilistic safety requirement: the
/// Segway heads for the cell of highest sample belief along a shortest path
/// that keeps one cell clear of cells already believed uninhabitable (falling
/// back to merely avoiding them, then to ignoring them), and the UAV and
/// Flipper move greedily on their information gain.
inline JointAction unsafe_nominal_policy(const FactoredBelief& b, const ExplorationScenario& s) {
    const RewardField field(b, s);
    const Move uav = information_greedy_move(b, s, Robot::Uav, field);
    const Move flipper = information_greedy_move(b, s, Robot::Flipper, field);

    const int seg = mode_cell(b.location[idx(Robot::Segway)]);
    const int peak = static_cast<int>(std::max_element(b.sample.begin(), b.sample.end()) - b.sample.begin());
    Move segway = Move::Stay;
    if (b.sample[peak] > b.sample[seg]) {
        auto open_cell = [&](int c) { return b.habitable[c] >= kLowHabitability; };
        auto clear_cell = [&](int c) {
            const Cell at = s.cell(c);
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    const Cell n{at.row + dr, at.col + dc};
                    if (s.in_grid(n) && !open_cell(s.index(n))) return false;
                }
            return true;
        };
        segway = first_step_towards(s, seg, peak, clear_cell);
        if (segway == Move::Stay) segway = first_step_towards(s, seg, peak, open_cell);
        if (segway == Move::Stay) segway = first_step_towards(s, seg, peak, [](int) { return true; });
    }
    return joint_action(s, uav, flipper, segway);
}

// ---------------------------------------------------------------------------
// Planner and world adapters

class ExplorationPlanningModel {
public:
    using belief_type = FactoredBelief;
    using observation_type = GridObservation;

    explicit ExplorationPlanningModel(const ExplorationScenario& s) : scenario_(&s), space_(s.action_space()) {}

    const MixedRadix& action_space() const { return space_; }

    auto bind(const FactoredBelief& b_prev, const GridObservation& z) const {
        auto conditioned = try_condition(b_prev, *scenario_, z);
        std::optional<RewardField> field;
        if (conditioned) field.emplace(*conditioned, *scenario_);
        return [s = scenario_, conditioned = std::move(conditioned),
                field = std::move(field)](const JointAction& a) -> std::optional<Evaluation<FactoredBelief>> {
            if (!conditioned) return std::nullopt;
            Evaluation<FactoredBelief> ev{*conditioned, 0.0};
            predict_in_place(ev.belief, *s, a);
            ev.reward = field->evaluate(ev.belief.location);
            return ev;
        };
    }

private:
    const ExplorationScenario* scenario_;
    MixedRadix space_;
};

class ExplorationWorld {
public:
    using observation_type = GridObservation;
    using state_type = ScenarioState;

    explicit ExplorationWorld(const ExplorationScenario& s) : scenario_(&s) {
        for (std::size_t r = 0; r < kRobots; ++r) state_.cells[r] = s.start_cell(static_cast<Robot>(r));
    }

    GridObservation observe_initial(Rng& rng) { return sense(*scenario_, state_, rng); }

    GridObservation execute(const JointAction& a, Rng& rng) {
        auto step = step_world(*scenario_, state_, a, rng);
        state_ = step.state;
        return std::move(step.observation);
    }

    WorldStatus status() const { return check_termination(state_, *scenario_); }
    const ScenarioState& state() const { return state_; }

private:
    const ExplorationScenario* scenario_;
    ScenarioState state_;
};

static_assert(PlanningModel<ExplorationPlanningModel>);
static_assert(World<ExplorationWorld>);

/// Mission prior: the build-time belief conditioned on the Segway standing
/// operational on its start cell.
inline FactoredBelief mission_initial_belief(const ExplorationScenario& s) {
    auto b = initial_belief(s);
    b.habitable[s.start_cell(Robot::Segway)] = 1.0;
    return b;
}

}  // namespace safe_mpomdp::grid
