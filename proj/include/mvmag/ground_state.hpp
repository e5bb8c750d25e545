// ground_state.hpp
// Minimum-Hamiltonian portfolios on the L1 unit sphere.
//
// The sphere sum |w_i| = 1 splits into 2^N orthants. Fixing a sign pattern s
// and substituting w_i = s_i x_i turns each orthant into a convex QP over the
// probability simplex, solved exactly by minimize_on_simplex. The production
// solver runs a seeded local search over sign patterns; enumerate_exact visits
// every orthant and grid_oracle brute-forces a weight lattice, both for checking.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "mvmag/data_ingest.hpp"
#include "mvmag/error.hpp"
#include "mvmag/model.hpp"
#include "mvmag/simplex_qp.hpp"

namespace mvmag {

enum class SolveMethod { heuristic, orthant_exact, grid_oracle };

inline const char* to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::heuristic: return "heuristic";
        case SolveMethod::orthant_exact: return "orthant_exact";
        case SolveMethod::grid_oracle: return "grid_oracle";
    }
    return "unknown";
}

// Which solver sweep_frontier and rolling_scan call per lambda.
enum class SearchStrategy { local_search, exhaustive };

class SignPattern {
public:
    SignPattern() = default;
    explicit SignPattern(std::vector<int> signs) : signs_(std::move(signs)) {
        for (int s : signs_)
            if (s != 1 && s != -1) throw InvalidArgument("sign pattern entries must be +1 or -1");
    }

    static SignPattern all(std::size_t n, int sign) { return SignPattern(std::vector<int>(n, sign)); }

    // Sign of each weight, zero weights mapped to +1.
    static SignPattern of(const Eigen::VectorXd& v) {
        std::vector<int> s(static_cast<std::size_t>(v.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) s[static_cast<std::size_t>(i)] = v[i] < 0.0 ? -1 : 1;
        return SignPattern(std::move(s));
    }

    std::size_t size() const { return signs_.size(); }
    int operator[](std::size_t i) const { return signs_[i]; }
    const std::vector<int>& signs() const { return signs_; }

    SignPattern flipped(std::size_t i) const {
        SignPattern p = *this;
        p.signs_[i] = -p.signs_[i];
        return p;
    }

    std::string key() const {
        std::string k(signs_.size(), '+');
        for (std::size_t i = 0; i < signs_.size(); ++i)
            if (signs_[i] < 0) k[i] = '-';
        return k;
    }

    bool operator==(const SignPattern&) const = default;

private:
    std::vector<int> signs_;
};

struct SolverConfig {
    int random_restarts = 8;
    std::uint64_t rng_seed = 20151102;
    double kkt_tolerance = 1e-9;
    int max_sign_flips = 200;
    int oracle_asset_limit = 12;
    SearchStrategy strategy = SearchStrategy::local_search;

    void validate() const {
        if (random_restarts < 0) throw InvalidArgument("random_restarts must be >= 0");
        if (!(kkt_tolerance > 0.0)) throw InvalidArgument("kkt_tolerance must be > 0");
        if (max_sign_flips < 0) throw InvalidArgument("max_sign_flips must be >= 0");
        if (oracle_asset_limit < 1 || oracle_asset_limit > 30)
            throw InvalidArgument("oracle_asset_limit must be in [1, 30]");
    }
};

struct GroundState {
    Portfolio portfolio;
    double hamiltonian_value;
    LambdaValue lambda;
    SolveMethod method;
    // Canonical signs of the weights (zero weights count as +).
    SignPattern signs;
    double expected_return;
    double variance;
};

// Strict improvements in the local search must beat this margin; values
// closer than this are ties.
inline constexpr double kStrictDecrease = 1e-12;

// Ordering used everywhere a single ground state is picked: lower
// Hamiltonian, then higher return, then lexicographically earliest signs
// with + before -.
inline bool preferred(const GroundState& a, const GroundState& b) {
    if (a.hamiltonian_value < b.hamiltonian_value - kStrictDecrease) return true;
    if (a.hamiltonian_value > b.hamiltonian_value + kStrictDecrease) return false;
    if (a.expected_return > b.expected_return + kStrictDecrease) return true;
    if (a.expected_return < b.expected_return - kStrictDecrease) return false;
    for (std::size_t i = 0; i < a.signs.size(); ++i)
        if (a.signs[i] != b.signs[i]) return a.signs[i] > b.signs[i];
    return false;
}

namespace detail {

inline GroundState make_ground_state(Eigen::VectorXd weights, const MarketMoment& m, LambdaValue lam,
                                     SolveMethod method) {
    auto signs = SignPattern::of(weights);
    Portfolio p = validate_budget(std::move(weights));
    const double ret = portfolio_return(p, m);
    const double var = portfolio_variance(p, m);
    const double h = hamiltonian(p, m, lam);
    return GroundState{std::move(p), h, lam, method, std::move(signs), ret, var};
}

struct OrthantSolution {
    GroundState state;
    SignPattern orthant;
    Eigen::VectorXd x;  // magnitudes |w_i| on the simplex
    double multiplier;
};

inline OrthantSolution solve_orthant_impl(const SignPattern& s, const MarketMoment& m, LambdaValue lam,
                                          double kkt_tolerance, const Eigen::VectorXd& warm = {}) {
    const auto n = static_cast<Eigen::Index>(m.asset_count());
    if (s.size() != m.asset_count()) throw DimensionMismatch("sign pattern length does not match asset count");
    Eigen::VectorXd sv(n);
    for (Eigen::Index i = 0; i < n; ++i) sv[i] = s[static_cast<std::size_t>(i)];
    const double l = lam.value();
    const Eigen::MatrixXd q = (1.0 - l) * (sv.asDiagonal() * m.covariance() * sv.asDiagonal());
    const Eigen::VectorXd c = -l * sv.cwiseProduct(m.mean_returns());
    auto qp = minimize_on_simplex(q, c, kkt_tolerance, warm);
    Eigen::VectorXd w = sv.cwiseProduct(qp.x);
    return OrthantSolution{make_ground_state(std::move(w), m, lam, SolveMethod::orthant_exact), s, std::move(qp.x),
                           qp.multiplier};
}

}  // namespace detail

// Exact minimizer of the Hamiltonian restricted to the orthant with signs `s`.
inline GroundState solve_orthant(const SignPattern& s, const MarketMoment& m, LambdaValue lam,
                                 const SolverConfig& cfg = {}) {
    cfg.validate();
    return detail::solve_orthant_impl(s, m, lam, cfg.kkt_tolerance).state;
}

// Local search over sign patterns. Seeds: sign(R), all +, all -, any
// `extra_seeds` (e.g. the neighbouring lambda's optimum), then
// `random_restarts` random patterns. From each seed, single-asset flips are
// tried (zero-weight assets first, screened by their KKT multiplier in the
// flipped orthant) and accepted on strict improvement.
inline GroundState solve_ground_state(const MarketMoment& m, LambdaValue lam, const SolverConfig& cfg = {},
                                      std::span<const SignPattern> extra_seeds = {}) {
    cfg.validate();
    const std::size_t n = m.asset_count();
    const double l = lam.value();
    std::unordered_map<std::string, detail::OrthantSolution> cache;

    auto evaluate = [&](const SignPattern& s, const Eigen::VectorXd& warm) -> const detail::OrthantSolution& {
        auto key = s.key();
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(std::move(key), detail::solve_orthant_impl(s, m, lam, cfg.kkt_tolerance, warm)).first;
        return it->second;
    };

    std::vector<SignPattern> seeds;
    seeds.push_back(SignPattern::of(m.mean_returns()));
    seeds.push_back(SignPattern::all(n, 1));
    seeds.push_back(SignPattern::all(n, -1));
    for (const auto& s : extra_seeds)
        if (s.size() == n) seeds.push_back(s);
    std::mt19937_64 rng(cfg.rng_seed);
    for (int r = 0; r < cfg.random_restarts; ++r) {
        std::vector<int> s(n);
        for (auto& v : s) v = (rng() >> 63) ? -1 : 1;
        seeds.emplace_back(std::move(s));
    }

    const GroundState* best = nullptr;
    std::vector<std::pair<double, std::size_t>> order;
    for (const auto& seed : seeds) {
        const detail::OrthantSolution* cur = &evaluate(seed, {});
        for (int flips = 0; flips < cfg.max_sign_flips; ++flips) {
            const auto& w = cur->state.portfolio.weights();
            const Eigen::VectorXd grad = 2.0 * (1.0 - l) * (m.covariance() * w) - l * m.mean_returns();
            const detail::OrthantSolution* next = nullptr;

            // Flipping a zero-weight asset keeps the current point feasible; it
            // can only help if that asset's multiplier in the flipped orthant is negative.
            order.clear();
            for (std::size_t i = 0; i < n; ++i) {
                if (cur->x[static_cast<Eigen::Index>(i)] != 0.0) continue;
                const double released = -cur->orthant[i] * grad[static_cast<Eigen::Index>(i)] - cur->multiplier;
                if (released < -cfg.kkt_tolerance) order.emplace_back(released, i);
            }
            std::sort(order.begin(), order.end());
            for (const auto& [score, i] : order) {
                const auto& cand = evaluate(cur->orthant.flipped(i), cur->x);
                if (cand.state.hamiltonian_value < cur->state.hamiltonian_value - kStrictDecrease) {
                    next = &cand;
                    break;
                }
            }

            if (!next) {
                order.clear();
                for (std::size_t i = 0; i < n; ++i) {
                    const double xi = cur->x[static_cast<Eigen::Index>(i)];
                    if (xi > 0.0) order.emplace_back(xi, i);
                }
                std::sort(order.begin(), order.end());
                for (const auto& [xi, i] : order) {
                    Eigen::VectorXd warm;
                    if (xi < 1.0) {
                        warm = cur->x;
                        warm[static_cast<Eigen::Index>(i)] = 0.0;
                        warm /= warm.sum();
                    }
                    const auto& cand = evaluate(cur->orthant.flipped(i), warm);
                    if (cand.state.hamiltonian_value < cur->state.hamiltonian_value - kStrictDecrease) {
                        next = &cand;
                        break;
                    }
                }
            }
            if (!next) break;
            cur = next;
        }
        if (!best || preferred(cur->state, *best)) best = &cur->state;
    }

    GroundState out = *best;
    out.method = SolveMethod::heuristic;
    return out;
}

// Global minimum by solving all 2^N orthants.
inline GroundState enumerate_exact(const MarketMoment& m, LambdaValue lam, const SolverConfig& cfg = {}) {
    cfg.validate();
    const std::size_t n = m.asset_count();
    if (n > static_cast<std::size_t>(cfg.oracle_asset_limit))
        throw InvalidArgument("enumerate_exact: " + std::to_string(n) + " assets exceeds oracle limit " +
                              std::to_string(cfg.oracle_asset_limit));
    std::optional<GroundState> best;
    std::vector<int> s(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        for (std::size_t i = 0; i < n; ++i) s[i] = (mask >> (n - 1 - i)) & 1U ? -1 : 1;
        auto sol = detail::solve_orthant_impl(SignPattern(s), m, lam, cfg.kkt_tolerance);
        if (!best || preferred(sol.state, *best)) best = std::move(sol.state);
    }
    best->method = SolveMethod::orthant_exact;
    return *best;
}

// Brute force over weights with |w_i| on a lattice of step 1/resolution and
// every sign assignment. Accuracy O(1/resolution); N <= 4 only.
inline GroundState grid_oracle(const MarketMoment& m, LambdaValue lam, int resolution) {
    const std::size_t n = m.asset_count();
    if (n > 4) throw InvalidArgument("grid_oracle supports at most 4 assets");
    if (resolution < 1) throw InvalidArgument("grid_oracle resolution must be >= 1");
    const double l = lam.value();
    const auto& r = m.mean_returns();
    const auto& cov = m.covariance();

    struct Candidate {
        double h, ret;
        std::vector<int> signs;
        std::vector<double> w;
    };
    std::optional<Candidate> best;
    std::vector<int> parts(n, 0);
    std::vector<double> w(n);
    std::vector<int> signs(n);

    auto consider = [&] {
        double ret = 0.0, var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ret += r[static_cast<Eigen::Index>(i)] * w[i];
            for (std::size_t j = 0; j < n; ++j)
                var += w[i] * cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * w[j];
        }
        const double h = -l * ret + (1.0 - l) * var;
        bool better = !best;
        if (!better) {
            if (h < best->h - kStrictDecrease) better = true;
            else if (h <= best->h + kStrictDecrease) {
                if (ret > best->ret + kStrictDecrease) better = true;
                else if (ret >= best->ret - kStrictDecrease) better = std::lexicographical_compare(
                    signs.begin(), signs.end(), best->signs.begin(), best->signs.end(), std::greater<>{});
            }
        }
        if (better) best = Candidate{h, ret, signs, w};
    };

    // Visits every sign assignment of the nonzero parts.
    auto with_signs = [&](auto&& self, std::size_t i) -> void {
        if (i == n) {
            consider();
            return;
        }
        const double mag = static_cast<double>(parts[i]) / resolution;
        w[i] = mag;
        signs[i] = 1;
        self(self, i + 1);
        if (parts[i] != 0) {
            w[i] = -mag;
            signs[i] = -1;
            self(self, i + 1);
        }
    };
    auto compose = [&](auto&& self, std::size_t i, int remaining) -> void {
        if (i + 1 == n) {
            parts[i] = remaining;
            with_signs(with_signs, 0);
            return;
        }
        for (int a = 0; a <= remaining; ++a) {
            parts[i] = a;
            self(self, i + 1, remaining - a);
        }
    };
    compose(compose, 0, resolution);

    Eigen::VectorXd weights = Eigen::Map<const Eigen::VectorXd>(best->w.data(), static_cast<Eigen::Index>(n));
    return detail::make_ground_state(std::move(weights), m, lam, SolveMethod::grid_oracle);
}

}  // namespace mvmag
