// selftest.hpp
// Oracle-equivalence and property checks on generated instances, runnable
// from the CLI (`mvmag selftest`).

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "mvmag/frontier.hpp"
#include "mvmag/indicators.hpp"
#include "mvmag/report.hpp"
#include "mvmag/synthetic.hpp"

namespace mvmag {

struct PropertyResult {
    std::string name;
    bool passed;
    std::string detail;
};

struct SelftestReport {
    std::vector<PropertyResult> results;
    bool all_passed() const {
        return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    }
};

// |a - b| relative to the size of the Hamiltonian's two terms at lambda.
inline double hamiltonian_rel_diff(double a, double b, const MarketMoment& m, double lambda) {
    const double scale = lambda * m.mean_returns().cwiseAbs().maxCoeff() +
                         (1.0 - lambda) * m.covariance().diagonal().cwiseAbs().maxCoeff();
    const double denom = std::max({std::abs(a), std::abs(b), scale, 1e-300});
    return std::abs(a - b) / denom;
}

// Local optimality on the L1 sphere, checked from scratch at `gs`: the
// gradient of H, signed by the weights, is constant on the support, and every
// zero-weight asset satisfies mu + |grad_i| <= tol so neither adjacent
// orthant offers descent. Returns the worst violation.
inline double sphere_kkt_violation(const GroundState& gs, const MarketMoment& m) {
    const auto& w = gs.portfolio.weights();
    const double l = gs.lambda.value();
    const Eigen::VectorXd grad = 2.0 * (1.0 - l) * (m.covariance() * w) - l * m.mean_returns();
    double mu = 0.0;
    int k = 0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w[i] != 0.0) {
            mu += (w[i] > 0 ? 1.0 : -1.0) * grad[i];
            ++k;
        }
    mu /= k;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w[i] != 0.0)
            worst = std::max(worst, std::abs((w[i] > 0 ? 1.0 : -1.0) * grad[i] - mu));
        else
            worst = std::max(worst, mu + std::abs(grad[i]));
    }
    return worst;
}

namespace detail {

inline double draw_lambda(std::mt19937_64& rng, int k) {
    if (k % 10 == 0) return 0.0;
    if (k % 10 == 1) return 1.0;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline PropertyResult check(const std::string& name, const std::function<std::string()>& body) {
    try {
        auto failure = body();
        return {name, failure.empty(), failure};
    } catch (const std::exception& e) {
        return {name, false, std::string("exception: ") + e.what()};
    }
}

}  // namespace detail

inline SelftestReport run_selftest(const SolverConfig& cfg = {}, std::uint64_t seed = 7) {
    SelftestReport report;
    std::mt19937_64 rng(seed);
    const double kkt_check_tolerance = 1e-9;
    SolverConfig exact = cfg;
    exact.strategy = SearchStrategy::exhaustive;

    report.results.push_back(detail::check("oracle_equivalence", [&]() -> std::string {
        for (int k = 0; k < 30; ++k) {
            const auto m = synthetic::random_moment(rng, 2 + static_cast<std::size_t>(k % 5));
            const LambdaValue lam(detail::draw_lambda(rng, k));
            const auto h = solve_ground_state(m, lam, cfg);
            const auto e = enumerate_exact(m, lam, cfg);
            if (hamiltonian_rel_diff(h.hamiltonian_value, e.hamiltonian_value, m, lam) > 1e-8)
                return "instance " + std::to_string(k) + ": heuristic H " + format_number(h.hamiltonian_value) +
                       " vs exact " + format_number(e.hamiltonian_value);
        }
        return {};
    }));

    report.results.push_back(detail::check("grid_oracle_consistency", [&]() -> std::string {
        for (int k = 0; k < 6; ++k) {
            const auto m = synthetic::random_moment(rng, 2 + static_cast<std::size_t>(k % 2));
            const LambdaValue lam(detail::draw_lambda(rng, k));
            const auto g = grid_oracle(m, lam, 200);
            const auto e = enumerate_exact(m, lam, cfg);
            const double gap = g.hamiltonian_value - e.hamiltonian_value;
            if (!(gap < 5e-3) || gap < -1e-9)
                return "instance " + std::to_string(k) + ": grid minus exact = " + format_number(gap);
        }
        return {};
    }));

    report.results.push_back(detail::check("sphere_kkt_conditions", [&]() -> std::string {
        for (int k = 0; k < 20; ++k) {
            const auto m = synthetic::random_moment(rng, 3 + static_cast<std::size_t>(k % 6));
            const LambdaValue lam(detail::draw_lambda(rng, k + 2));
            const auto h = solve_ground_state(m, lam, cfg);
            const double v = sphere_kkt_violation(h, m);
            if (v > kkt_check_tolerance) return "instance " + std::to_string(k) + ": violation " + format_number(v);
        }
        return {};
    }));

    report.results.push_back(detail::check("lambda_one_closed_form", [&]() -> std::string {
        for (int k = 0; k < 20; ++k) {
            const auto m = synthetic::random_moment(rng, 2 + static_cast<std::size_t>(k % 7));
            Eigen::Index arg = 0;
            m.mean_returns().cwiseAbs().maxCoeff(&arg);
            const auto h = solve_ground_state(m, LambdaValue(1.0), cfg);
            Eigen::VectorXd expect = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.asset_count()));
            expect[arg] = m.mean_returns()[arg] < 0 ? -1.0 : 1.0;
            if (h.portfolio.weights() != expect) return "instance " + std::to_string(k) + ": not a signed unit vector";
        }
        return {};
    }));

    report.results.push_back(detail::check("random_feasible_dominance", [&]() -> std::string {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int k = 0; k < 5; ++k) {
            const auto m = synthetic::random_moment(rng, 4 + static_cast<std::size_t>(k));
            const LambdaValue lam(detail::draw_lambda(rng, k + 2));
            const auto h = solve_ground_state(m, lam, cfg);
            for (int s = 0; s < 1000; ++s) {
                Eigen::VectorXd w(static_cast<Eigen::Index>(m.asset_count()));
                for (auto& v : w) v = u(rng);
                w /= w.cwiseAbs().sum();
                const double hr = hamiltonian(validate_budget(w), m, lam);
                if (hr < h.hamiltonian_value - 1e-12)
                    return "instance " + std::to_string(k) + ": random portfolio beats solver by " +
                           format_number(h.hamiltonian_value - hr);
            }
        }
        return {};
    }));

    report.results.push_back(detail::check("budget_constraint", [&]() -> std::string {
        const auto m = synthetic::random_moment(rng, 8);
        const auto curve = sweep_frontier(m, LambdaGrid::uniform(21), cfg);
        for (const auto& s : curve.states) {
            const double l1 = s.portfolio.weights().cwiseAbs().sum();
            if (std::abs(l1 - 1.0) > kBudgetTolerance) return "sum |w| = " + format_number(l1);
        }
        return {};
    }));

    report.results.push_back(detail::check("antisymmetry", [&]() -> std::string {
        for (int k = 0; k < 3; ++k) {
            const auto m = synthetic::random_moment(rng, 3 + static_cast<std::size_t>(k));
            const MarketMoment mirrored(-m.mean_returns(), m.covariance());
            const auto grid = LambdaGrid::uniform(21);
            const auto a = sweep_frontier(m, grid, exact);
            const auto b = sweep_frontier(mirrored, grid, exact);
            for (std::size_t j = 0; j < grid.size(); ++j)
                if (std::abs(a.magnetizations[j] + b.magnetizations[j]) > 1e-8)
                    return "m not negated at lambda " + format_number(grid[j]);
        }
        return {};
    }));

    report.results.push_back(detail::check("frontier_monotonicity", [&]() -> std::string {
        for (int k = 0; k < 3; ++k) {
            const auto m = synthetic::random_moment(rng, 3 + static_cast<std::size_t>(k));
            const auto curve = sweep_frontier(m, LambdaGrid::uniform(51), exact);
            for (std::size_t j = 1; j < curve.states.size(); ++j) {
                const auto& lo = curve.states[j - 1];
                const auto& hi = curve.states[j];
                if (lo.expected_return > hi.expected_return + 1e-9 || lo.variance > hi.variance + 1e-9)
                    return "return or variance decreases at lambda " + format_number(curve.grid[j]);
            }
        }
        return {};
    }));

    report.results.push_back(detail::check("carm_closed_form", [&]() -> std::string {
        for (std::size_t n : {1U, 2U, 5U, 12U}) {
            const std::vector<double> ones(40, 1.0);
            const auto c = carm(ones, {n, false});
            double harmonic = 0.0;
            for (std::size_t i = 1; i <= n; ++i) harmonic += 1.0 / static_cast<double>(i);
            if (std::abs(c.back() - (1.0 + harmonic / static_cast<double>(n))) > 1e-12)
                return "N = " + std::to_string(n) + ": " + format_number(c.back());
        }
        return {};
    }));

    report.results.push_back(detail::check("determinism", [&]() -> std::string {
        const auto m = synthetic::random_moment(rng, 7);
        const LambdaValue lam(0.37);
        const auto a = solve_ground_state(m, lam, cfg);
        const auto b = solve_ground_state(m, lam, cfg);
        if (a.portfolio.weights() != b.portfolio.weights()) return "repeated solves differ";
        return {};
    }));

    return report;
}

inline void print_report(std::ostream& out, const SelftestReport& report) {
    for (const auto& r : report.results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.passed) out << ": " << r.detail;
        out << '\n';
    }
    out << (report.all_passed() ? "all properties passed" : "some properties FAILED") << '\n';
}

}  // namespace mvmag
