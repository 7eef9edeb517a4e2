#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <safe_mpomdp/belief.hpp>
#include <safe_mpomdp/barrier_io.hpp>
#include <safe_mpomdp/dtbf.hpp>

#include "oracles.hpp"

using namespace safe_mpomdp;

namespace {

BarrierSpec<double> identity(double alpha0) {
    return BarrierSpec<double>::single([](const double& h) { return h; }, KappaFn::constant(alpha0));
}

}  // namespace

TEST(Kappa, ConstantRate) {
    const auto k = KappaFn::constant(0.3);
    EXPECT_DOUBLE_EQ(k(2.0), 0.6);
    EXPECT_DOUBLE_EQ(k(-1.0), -0.3);
    EXPECT_EQ(k.constant_rate(), 0.3);
}

TEST(Kappa, RejectsRatesOutsideOpenUnitInterval) {
    EXPECT_THROW(KappaFn::constant(0.0), std::invalid_argument);
    EXPECT_THROW(KappaFn::constant(1.0), std::invalid_argument);
    EXPECT_THROW(KappaFn::constant(-0.2), std::invalid_argument);
}

TEST(Kappa, GeneralIsOddExtended) {
    const auto k = KappaFn::general([](double r) { return 0.5 * r * r; });
    EXPECT_DOUBLE_EQ(k(0.5), 0.125);
    EXPECT_DOUBLE_EQ(k(-0.5), -0.125);
    EXPECT_FALSE(k.constant_rate().has_value());
}

TEST(Kappa, GeneralMembershipChecked) {
    EXPECT_THROW(KappaFn::general([](double r) { return r + 0.1; }), std::invalid_argument);
    EXPECT_THROW(KappaFn::general([](double r) { return 1.5 * r; }), std::invalid_argument);
    EXPECT_THROW(KappaFn::general([](double) { return 0.0; }), std::invalid_argument);
    EXPECT_THROW(KappaFn::general({}), std::invalid_argument);
}

TEST(Condition, MarginAndVerdict) {
    const auto k = KappaFn::constant(0.5);
    const auto c = dtbf_condition_values(k, 0.4, 0.25);
    EXPECT_NEAR(c.margin, 0.05, 1e-15);
    EXPECT_TRUE(c.satisfied);
    EXPECT_FALSE(dtbf_condition_values(k, 0.4, 0.19).satisfied);
}

TEST(Condition, BoundaryIsSatisfied) {
    // h drops exactly by alpha(h_prev).
    const auto k = KappaFn::constant(0.25);
    EXPECT_TRUE(dtbf_condition_values(k, 0.8, 0.6).satisfied);
    EXPECT_TRUE(dtbf_condition_values(k, 0.0, 0.0).satisfied);
}

TEST(Condition, NegativeRegionMustRecover) {
    // Outside the safe set the barrier has to rise at least by -alpha(h).
    const auto k = KappaFn::constant(0.5);
    EXPECT_FALSE(dtbf_condition_values(k, -0.2, -0.2).satisfied);
    EXPECT_TRUE(dtbf_condition_values(k, -0.2, -0.1).satisfied);
}

TEST(Composition, MinAndMax) {
    using B = std::vector<double>;
    std::vector<BarrierComponent<B>> comps{{[](const B& b) { return b[0]; }, false, "a"},
                                           {[](const B& b) { return b[1]; }, false, "b"},
                                           {[](const B& b) { return b[2]; }, true, "c"}};
    const B b{0.3, -0.1, 0.2};
    BarrierSpec<B> conj(comps, Composition::Conjunction, KappaFn::constant(0.5));
    BarrierSpec<B> disj(comps, Composition::Disjunction, KappaFn::constant(0.5));
    EXPECT_DOUBLE_EQ(barrier_value(conj, b), -0.2);
    EXPECT_DOUBLE_EQ(barrier_value(disj, b), 0.3);
}

TEST(Composition, SpecValidation) {
    using B = double;
    auto h = [](const B& b) { return b; };
    EXPECT_THROW(BarrierSpec<B>({}, Composition::Conjunction, KappaFn::constant(0.5)), std::invalid_argument);
    EXPECT_THROW(BarrierSpec<B>({{h, false, "a"}, {h, false, "b"}}, Composition::Single, KappaFn::constant(0.5)),
                 std::invalid_argument);
    EXPECT_THROW(BarrierSpec<B>({{{}, false, "a"}}, Composition::Single, KappaFn::constant(0.5)), std::invalid_argument);
}

TEST(Decay, BoundValues) {
    EXPECT_DOUBLE_EQ(decay_lower_bound(1.0, 0.5, 3), 0.125);
    EXPECT_DOUBLE_EQ(decay_lower_bound(0.4, 0.1, 0), 0.4);
}

TEST(TraceVerification, SatisfyingTracesStayInvariant) {
    Rng rng(21);
    for (double alpha0 : {0.1, 0.5, 0.9})
        for (int i = 0; i < 30; ++i) {
            const auto h = oracle::satisfying_values(rng, alpha0, rng.uniform(), 40);
            const auto rep = verify_barrier_values(h, KappaFn::constant(alpha0));
            ASSERT_EQ(rep.violation_count(), 0u);
            ASSERT_TRUE(rep.bound_checked);
            ASSERT_TRUE(rep.ok());
            for (std::size_t t = 0; t < h.size(); ++t) {
                ASSERT_GE(h[t], -1e-9);
                ASSERT_GE(h[t], std::pow(1.0 - alpha0, double(t)) * h[0] - 1e-9);
            }
        }
}

TEST(TraceVerification, FlagsFirstViolation) {
    const std::vector<double> h{0.5, 0.4, 0.1, 0.05, -0.3};
    const auto rep = verify_barrier_values(h, KappaFn::constant(0.5));
    ASSERT_TRUE(rep.first_violation.has_value());
    EXPECT_EQ(*rep.first_violation, 1u);
    EXPECT_EQ(rep.violation_count(), 2u);
    ASSERT_TRUE(rep.first_bound_violation.has_value());
    EXPECT_FALSE(rep.ok());
}

TEST(TraceVerification, NoBoundCheckFromUnsafeStart) {
    const std::vector<double> h{-0.5, -0.2, 0.1};
    const auto rep = verify_barrier_values(h, KappaFn::constant(0.5));
    EXPECT_FALSE(rep.bound_checked);
    EXPECT_EQ(rep.violation_count(), 0u);
}

TEST(TraceVerification, NoBoundCheckForGeneralKappa) {
    const std::vector<double> h{0.5, 0.45};
    const auto rep = verify_barrier_values(h, KappaFn::general([](double r) { return r / (1.0 + r); }));
    EXPECT_FALSE(rep.bound_checked);
    EXPECT_TRUE(rep.ok());
}

TEST(TraceVerification, BeliefTraceWithLinearBarrier) {
    Rng rng(22);
    oracle::LinearBarrier h{{1.0, 0.0, 0.0}, 0.2};
    const auto trace = oracle::satisfying_beliefs(rng, h, 0.3, {0.6, 0.2, 0.2}, 25);
    std::vector<Belief> beliefs;
    for (const auto& b : trace) beliefs.emplace_back(b);
    auto spec = BarrierSpec<Belief>::single([](const Belief& b) { return b[0] - 0.2; }, KappaFn::constant(0.3));
    const auto rep = verify_invariance_on_trace(spec, beliefs);
    EXPECT_TRUE(rep.ok());
    for (double v : rep.values) EXPECT_GE(v, -1e-9);
}

TEST(Properties, ConjunctionOfSatisfyingComponentsStaysNonnegative) {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const double alpha0 = 0.1 + 0.8 * rng.uniform();
        std::vector<std::vector<double>> comps;
        for (int k = 0; k < 3; ++k) comps.push_back(oracle::satisfying_values(rng, alpha0, rng.uniform(), 30));
        for (std::size_t t = 0; t < comps[0].size(); ++t)
            ASSERT_GE(std::min({comps[0][t], comps[1][t], comps[2][t]}), -1e-12);
    }
}

TEST(BarrierIo, LinearThreshold) {
    const auto spec = barrier_spec_from_json(
        nlohmann::json::parse(R"({"alpha0": 0.4, "components": [{"type": "linear-threshold", "states": [0, 2], "threshold": 0.5}]})"),
        3);
    EXPECT_NEAR(barrier_value(spec, Belief{0.3, 0.3, 0.4}), 0.2, 1e-15);
    EXPECT_EQ(spec.kappa().constant_rate(), 0.4);
}

TEST(BarrierIo, WeightedNegatedConjunction) {
    const auto spec = barrier_spec_from_json(nlohmann::json::parse(R"({
        "alpha0": 0.5, "composition": "conjunction",
        "components": [
          {"type": "weighted-probability", "weights": [1, 0], "threshold": 0.2},
          {"type": "weighted-probability", "weights": [1, 0], "threshold": 0.9, "negated": true}]})"),
                                             2);
    EXPECT_NEAR(barrier_value(spec, Belief{0.5, 0.5}), 0.3, 1e-15);
    EXPECT_NEAR(barrier_value(spec, Belief{0.95, 0.05}), -0.05, 1e-15);
}

TEST(BarrierIo, Errors) {
    EXPECT_THROW(barrier_spec_from_json(nlohmann::json::parse(R"({"alpha0": 0.5, "type": "bogus"})"), 2),
                 InvalidBarrierConfig);
    EXPECT_THROW(barrier_spec_from_json(
                     nlohmann::json::parse(R"({"alpha0": 0.5, "type": "linear-threshold", "states": [5]})"), 2),
                 InvalidBarrierConfig);
    EXPECT_THROW(barrier_spec_from_json(
                     nlohmann::json::parse(R"({"alpha0": 1.5, "type": "linear-threshold", "states": [0]})"), 2),
                 InvalidBarrierConfig);
    EXPECT_THROW(barrier_spec_from_json(nlohmann::json::parse(R"({"type": "linear-threshold", "states": [0]})"), 2),
                 InvalidBarrierConfig);
}
