#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace safe_mpomdp {

inline constexpr double kMarginTolerance = 1e-12;
inline constexpr double kInvarianceTolerance = 1e-9;

/// Class-K rate function alpha with alpha(r) < r for r > 0.
///
/// Constant(a0) is alpha(r) = a0 * r on the whole real line. A general map is
/// supplied on [0, inf) and extended to negative arguments as an odd function,
/// alpha(r) = -alpha(-r), so the condition stays meaningful outside the safe set.
class KappaFn {
public:
    static KappaFn constant(double alpha0) {
        if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw std::invalid_argument("alpha0 must lie in (0, 1)");
        KappaFn k;
        k.alpha0_ = alpha0;
        return k;
    }

    // Membership is checked on a 100-point grid over [0, r_max].
    static KappaFn general(std::function<double(double)> alpha, double r_max = 1.0) {
        if (!alpha) throw std::invalid_argument("kappa function is empty");
        if (!(r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
        if (std::abs(alpha(0.0)) > 1e-12) throw std::invalid_argument("kappa function must vanish at 0");
        constexpr int kGrid = 100;
        double prev = alpha(0.0);
        for (int i = 1; i < kGrid; ++i) {
            const double r = r_max * static_cast<double>(i) / (kGrid - 1);
            const double v = alpha(r);
            if (!(v > prev)) throw std::invalid_argument("kappa function is not strictly increasing");
            if (!(v < r)) throw std::invalid_argument("kappa function must satisfy alpha(r) < r");
            prev = v;
        }
        KappaFn k;
        k.general_ = std::move(alpha);
        return k;
    }

    double operator()(double r) const {
        if (alpha0_) return *alpha0_ * r;
        return r >= 0.0 ? general_(r) : -general_(-r);
    }

    /// alpha0 when this is the constant-rate form.
    std::optional<double> constant_rate() const { return alpha0_; }

private:
    KappaFn() = default;
    std::optional<double> alpha0_;
    std::function<double(double)> general_;
};

enum class Composition { Single, Conjunction, Disjunction };

template <class B>
struct BarrierComponent {
    std::function<double(const B&)> h;
    bool negated = false;
    std::string name;
};

/// Barrier function over beliefs of type B, possibly a min (conjunction) or
/// max (disjunction) over components. Negation applies per component, before
/// composition.
template <class B>
class BarrierSpec {
public:
    BarrierSpec(std::vector<BarrierComponent<B>> components, Composition composition, KappaFn kappa)
        : components_(std::move(components)), composition_(composition), kappa_(std::move(kappa)) {
        if (components_.empty()) throw std::invalid_argument("barrier spec needs at least one component");
        if (composition_ == Composition::Single && components_.size() != 1)
            throw std::invalid_argument("single composition needs exactly one component");
        for (const auto& c : components_)
            if (!c.h) throw std::invalid_argument("barrier component is empty");
    }

    static BarrierSpec single(std::function<double(const B&)> h, KappaFn kappa, std::string name = "h") {
        return BarrierSpec({{std::move(h), false, std::move(name)}}, Composition::Single, std::move(kappa));
    }

    const std::vector<BarrierComponent<B>>& components() const { return components_; }
    Composition composition() const { return composition_; }
    const KappaFn& kappa() const { return kappa_; }

    double component_value(std::size_t i, const B& b) const {
        const double v = components_[i].h(b);
        return components_[i].negated ? -v : v;
    }

private:
    std::vector<BarrierComponent<B>> components_;
    Composition composition_;
    KappaFn kappa_;
};

template <class B>
double barrier_value(const BarrierSpec<B>& spec, const B& b) {
    const auto n = spec.components().size();
    switch (spec.composition()) {
        case Composition::Single:
            return spec.component_value(0, b);
        case Composition::Conjunction: {
            double v = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) v = std::min(v, spec.component_value(i, b));
            return v;
        }
        case Composition::Disjunction: {
            double v = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) v = std::max(v, spec.component_value(i, b));
            return v;
        }
    }
    throw std::logic_error("unknown composition");
}

struct ConditionResult {
    bool satisfied = false;
    double margin = 0.0;  // h(next) - h(prev) + alpha(h(prev))
    double h_prev = 0.0;
    double h_next = 0.0;
};

/// One-step condition on already-evaluated barrier values.
inline ConditionResult dtbf_condition_values(const KappaFn& kappa, double h_prev, double h_next) {
    const double margin = h_next - h_prev + kappa(h_prev);
    return {margin >= -kMarginTolerance, margin, h_prev, h_next};
}

/// h(next) - h(prev) >= -alpha(h(prev)) on the composed barrier value.
template <class B>
ConditionResult dtbf_condition(const BarrierSpec<B>& spec, const B& prev, const B& next) {
    return dtbf_condition_values(spec.kappa(), barrier_value(spec, prev), barrier_value(spec, next));
}

/// (1 - alpha0)^t * h0, the constant-rate lower bound along a satisfying trace.
inline double decay_lower_bound(double h0, double alpha0, std::size_t t) {
    return std::pow(1.0 - alpha0, static_cast<double>(t)) * h0;
}

struct TraceReport {
    std::vector<double> values;              // h at every trace entry
    std::vector<ConditionResult> steps;      // one per adjacent pair
    std::optional<std::size_t> first_violation;  // index t of the violating pair (t, t+1)
    // Filled only for constant-rate kappa and a nonnegative start.
    bool bound_checked = false;
    std::vector<bool> decay_ok;
    std::vector<bool> nonnegative_ok;
    std::optional<std::size_t> first_bound_violation;

    std::size_t violation_count() const {
        std::size_t n = 0;
        for (const auto& s : steps) n += s.satisfied ? 0 : 1;
        return n;
    }
    bool ok() const { return !first_violation && !first_bound_violation; }
};

template <class B>
TraceReport verify_invariance_on_trace(const BarrierSpec<B>& spec, std::span<const B> trace) {
    TraceReport report;
    report.values.reserve(trace.size());
    for (const auto& b : trace) report.values.push_back(barrier_value(spec, b));

    for (std::size_t t = 0; t + 1 < trace.size(); ++t) {
        auto step = dtbf_condition_values(spec.kappa(), report.values[t], report.values[t + 1]);
        if (!step.satisfied && !report.first_violation) report.first_violation = t;
        report.steps.push_back(step);
    }

    const auto alpha0 = spec.kappa().constant_rate();
    if (alpha0 && !trace.empty() && report.values[0] >= 0.0) {
        report.bound_checked = true;
        const double h0 = report.values[0];
        for (std::size_t t = 0; t < trace.size(); ++t) {
            const double h = report.values[t];
            const bool decay = h >= decay_lower_bound(h0, *alpha0, t) - kInvarianceTolerance;
            const bool nonneg = h >= -kInvarianceTolerance;
            report.decay_ok.push_back(decay);
            report.nonnegative_ok.push_back(nonneg);
            if (!(decay && nonneg) && !report.first_bound_violation) report.first_bound_violation = t;
        }
    }
    return report;
}

template <class B>
TraceReport verify_invariance_on_trace(const BarrierSpec<B>& spec, const std::vector<B>& trace) {
    return verify_invariance_on_trace(spec, std::span<const B>(trace));
}

/// Verification when only the recorded barrier values are available.
inline TraceReport verify_barrier_values(std::span<const double> values, const KappaFn& kappa) {
    auto identity = BarrierSpec<double>::single([](const double& h) { return h; }, kappa);
    return verify_invariance_on_trace(identity, values);
}

}  // namespace safe_mpomdp
