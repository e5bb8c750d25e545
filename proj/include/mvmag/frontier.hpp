// frontier.hpp
// Lambda sweep of ground states, the magnetization curve m(lambda), its
// integral M, and the two cursor events: the zero crossing E and the
// saturation point E'.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mvmag/ground_state.hpp"

namespace mvmag {

class LambdaGrid {
public:
    explicit LambdaGrid(std::vector<double> values) : values_(std::move(values)) {
        if (values_.size() < 2) throw InvalidArgument("lambda grid needs at least 2 points");
        if (values_.front() != 0.0 || values_.back() != 1.0)
            throw InvalidArgument("lambda grid must start at 0 and end at 1");
        for (std::size_t k = 1; k < values_.size(); ++k)
            if (!(values_[k - 1] < values_[k])) throw InvalidArgument("lambda grid must be strictly increasing");
    }

    // `points` evenly spaced values; k/(points-1) so the endpoints are exact.
    static LambdaGrid uniform(std::size_t points = 101) {
        if (points < 2) throw InvalidArgument("lambda grid needs at least 2 points");
        std::vector<double> v(points);
        const double denom = static_cast<double>(points - 1);
        for (std::size_t k = 0; k < points; ++k) v[k] = static_cast<double>(k) / denom;
        return LambdaGrid(std::move(v));
    }

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t k) const { return values_[k]; }

private:
    std::vector<double> values_;
};

struct FrontierCurve {
    LambdaGrid grid;
    std::vector<GroundState> states;
    std::vector<double> magnetizations;
};

struct ZeroCrossing {
    double lambda;
    // Bracketing grid indices; equal when m vanishes on a grid point.
    std::size_t lower;
    std::size_t upper;
};

struct EventOutcome {
    double zero_event;  // E
    double max_event;   // E'
};

inline constexpr double kZeroTolerance = 1e-9;
inline constexpr double kSaturationTolerance = 1e-9;

inline GroundState solve_for_strategy(const MarketMoment& m, LambdaValue lam, const SolverConfig& cfg,
                                      std::span<const SignPattern> seeds = {}) {
    return cfg.strategy == SearchStrategy::exhaustive ? enumerate_exact(m, lam, cfg)
                                                      : solve_ground_state(m, lam, cfg, seeds);
}

// One ground state per grid point. The local search is seeded with the
// previous lambda's optimum.
inline FrontierCurve sweep_frontier(const MarketMoment& m, const LambdaGrid& grid, const SolverConfig& cfg = {}) {
    std::vector<GroundState> states;
    std::vector<double> mags;
    states.reserve(grid.size());
    mags.reserve(grid.size());
    std::vector<SignPattern> warm;
    for (double lv : grid.values()) {
        try {
            states.push_back(solve_for_strategy(m, LambdaValue(lv), cfg, warm));
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " (lambda = " + std::to_string(lv) + ")");
        }
        mags.push_back(magnetization(states.back().portfolio));
        warm.assign(1, states.back().signs);
    }
    return FrontierCurve{grid, std::move(states), std::move(mags)};
}

// Trapezoidal integral of m over [0, 1].
inline double integrated_magnetization(const FrontierCurve& curve) {
    const auto& x = curve.grid.values();
    const auto& m = curve.magnetizations;
    double total = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) total += 0.5 * (x[k] - x[k - 1]) * (m[k] + m[k - 1]);
    return std::clamp(total, -1.0, 1.0);
}

// Every zero of m above the first grid point, in increasing lambda: grid
// points with |m| <= kZeroTolerance and linearly interpolated sign changes
// between adjacent points. The lambda = 0 sample takes no part.
inline std::vector<ZeroCrossing> zero_crossings(const FrontierCurve& curve) {
    const auto& x = curve.grid.values();
    const auto& m = curve.magnetizations;
    std::vector<ZeroCrossing> out;
    for (std::size_t k = 1; k < x.size(); ++k) {
        if (k >= 2) {
            const double a = m[k - 1], b = m[k];
            if ((a > kZeroTolerance && b < -kZeroTolerance) || (a < -kZeroTolerance && b > kZeroTolerance))
                out.push_back({x[k - 1] + (x[k] - x[k - 1]) * (a / (a - b)), k - 1, k});
        }
        if (std::abs(m[k]) <= kZeroTolerance) out.push_back({x[k], k, k});
    }
    return out;
}

inline double detect_zero_event(const FrontierCurve& curve) {
    const auto crossings = zero_crossings(curve);
    return crossings.empty() ? 0.0 : crossings.front().lambda;
}

// Smallest lambda where |m| reaches its maximum over the grid.
inline double detect_max_event(const FrontierCurve& curve) {
    const auto& m = curve.magnetizations;
    double peak = 0.0;
    for (double v : m) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    for (std::size_t k = 0; k < m.size(); ++k)
        if (std::abs(m[k]) >= peak - kSaturationTolerance) return curve.grid[k];
    return 0.0;
}

inline EventOutcome detect_events(const FrontierCurve& curve) {
    return {detect_zero_event(curve), detect_max_event(curve)};
}

}  // namespace mvmag
