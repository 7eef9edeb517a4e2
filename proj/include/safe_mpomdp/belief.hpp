#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace safe_mpomdp {

inline constexpr double kSimplexTolerance = 1e-9;

/// Probability vector over the hidden states of a model.
class Belief {
public:
    Belief() = default;
    explicit Belief(std::vector<double> probs) : probs_(std::move(probs)) {}
    Belief(std::initializer_list<double> probs) : probs_(probs) {}

    static Belief point_mass(std::size_t size, std::size_t at) {
        std::vector<double> p(size, 0.0);
        p.at(at) = 1.0;
        return Belief(std::move(p));
    }
    static Belief uniform(std::size_t size) { return Belief(std::vector<double>(size, 1.0 / static_cast<double>(size))); }

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t q) const { return probs_[q]; }
    std::span<const double> probs() const { return probs_; }

    double sum() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

    bool on_simplex(double tol = kSimplexTolerance) const {
        if (probs_.empty()) return false;
        for (double p : probs_)
            if (!(p >= -tol && p <= 1.0 + tol)) return false;
        return std::abs(sum() - 1.0) <= tol;
    }

    bool operator==(const Belief&) const = default;

private:
    std::vector<double> probs_;
};

}  // namespace safe_mpomdp
