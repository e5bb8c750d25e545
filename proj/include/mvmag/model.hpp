// model.hpp
// Portfolio on the L1 unit sphere and the mean-variance objective terms.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "mvmag/data_ingest.hpp"
#include "mvmag/error.hpp"

namespace mvmag {

inline constexpr double kBudgetTolerance = 1e-10;
inline constexpr double kVarianceClamp = 1e-12;

// Weights with sum |w_i| = 1 (short positions allowed). Build through validate_budget.
class Portfolio {
public:
    const Eigen::VectorXd& weights() const { return weights_; }
    std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
    double operator[](std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }

    Portfolio operator-() const { return Portfolio(-weights_); }

private:
    explicit Portfolio(Eigen::VectorXd w) : weights_(std::move(w)) {}
    friend Portfolio validate_budget(Eigen::VectorXd weights);

    Eigen::VectorXd weights_;
};

inline Portfolio validate_budget(Eigen::VectorXd weights) {
    if (weights.size() == 0) throw InvalidArgument("portfolio needs at least one weight");
    if (!weights.allFinite()) throw InvalidArgument("non-finite portfolio weight");
    const double l1 = weights.cwiseAbs().sum();
    if (std::abs(l1 - 1.0) > kBudgetTolerance)
        throw BudgetViolation("budget constraint violated: sum |w_i| = " + std::to_string(l1), l1);
    return Portfolio(std::move(weights));
}

inline Portfolio validate_budget(std::span<const double> weights) {
    return validate_budget(Eigen::VectorXd(
        Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()))));
}

// Weighting between return and risk, restricted to [0, 1].
class LambdaValue {
public:
    explicit LambdaValue(double v) : value_(v) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1], got " + std::to_string(v));
    }
    double value() const { return value_; }
    operator double() const { return value_; }

private:
    double value_;
};

namespace detail {
inline void check_dims(const Portfolio& p, const MarketMoment& m) {
    if (p.size() != m.asset_count())
        throw DimensionMismatch("portfolio has " + std::to_string(p.size()) + " weights, moment has " +
                                std::to_string(m.asset_count()) + " assets");
}
}  // namespace detail

inline double portfolio_return(const Portfolio& p, const MarketMoment& m) {
    detail::check_dims(p, m);
    return m.mean_returns().dot(p.weights());
}

// sigma' C sigma, clamped to 0 when round-off pushes it marginally negative.
inline double portfolio_variance(const Portfolio& p, const MarketMoment& m) {
    detail::check_dims(p, m);
    const double v = p.weights().dot(m.covariance() * p.weights());
    return (v < 0.0 && v >= -kVarianceClamp) ? 0.0 : v;
}

inline double hamiltonian(const Portfolio& p, const MarketMoment& m, LambdaValue lam) {
    return -lam.value() * portfolio_return(p, m) + (1.0 - lam.value()) * portfolio_variance(p, m);
}

// Net exposure sum w_i; clamped to [-1, 1] against last-ulp drift.
inline double magnetization(const Portfolio& p) {
    return std::clamp(p.weights().sum(), -1.0, 1.0);
}

}  // namespace mvmag
