#include <catch_amalgamated.hpp>

#include <random>

#include "mvmag/indicators.hpp"
#include "mvmag/synthetic.hpp"

using namespace mvmag;
using Catch::Matchers::WithinAbs;

namespace {

// Term-by-term evaluation of
//   CARM(t) = 1/N * sum_{i=1}^{N} sum_{j=0}^{i} E(t - j) / i
// enumerating (j, i) pairs in the opposite order to the library.
std::vector<double> carm_reference(const std::vector<double>& e, std::size_t n) {
    std::vector<double> out(e.size(), 0.0);
    for (std::size_t t = 0; t < e.size(); ++t)
        for (std::size_t j = 0; j <= n; ++j) {
            if (j > t) break;
            for (std::size_t i = std::max<std::size_t>(j, 1); i <= n; ++i)
                out[t] += e[t - j] / static_cast<double>(i) / static_cast<double>(n);
        }
    return out;
}

double harmonic(std::size_t n) {
    double h = 0.0;
    for (std::size_t i = 1; i <= n; ++i) h += 1.0 / static_cast<double>(i);
    return h;
}

SolverConfig exact_config() {
    SolverConfig cfg;
    cfg.strategy = SearchStrategy::exhaustive;
    return cfg;
}

}  // namespace

TEST_CASE("carm worked examples") {
    const std::vector<double> twos(10, 2.0);
    const auto c = carm(twos, {2, false});
    CHECK_THAT(c.back(), WithinAbs(1.75 * 2.0, 1e-15));

    CHECK(carm(std::vector<double>(7, 0.0), {3, false}) == std::vector<double>(7, 0.0));

    std::vector<double> spike(9, 0.0);
    spike[4] = 1.0;
    const auto s = carm(spike, {2, false});
    CHECK_THAT(s[4], WithinAbs(0.75, 1e-15));
    CHECK(s[3] == 0.0);
    // one step later only i = 1, 2 with j = 1 reach the spike: (1/2)(1/1 + 1/2)
    CHECK_THAT(s[5], WithinAbs(0.75, 1e-15));
    // two steps later only i = 2, j = 2: (1/2)(1/2)
    CHECK_THAT(s[6], WithinAbs(0.25, 1e-15));
    CHECK(s[7] == 0.0);
}

TEST_CASE("carm matches the term-by-term reference") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t n : {1U, 2U, 3U, 7U, 12U}) {
        std::vector<double> e(40);
        for (auto& v : e) v = u(rng) < 0.4 ? u(rng) : 0.0;
        const auto a = carm(e, {n, false});
        const auto b = carm_reference(e, n);
        for (std::size_t t = 0; t < e.size(); ++t) CHECK_THAT(a[t], WithinAbs(b[t], 1e-14));
    }
}

TEST_CASE("carm of a constant series is c (1 + H_N / N) in the interior") {
    for (std::size_t n : {1U, 2U, 5U, 12U}) {
        const auto c = carm(std::vector<double>(30, 1.0), {n, false});
        CHECK_THAT(c[n], WithinAbs(1.0 + harmonic(n) / static_cast<double>(n), 1e-12));
        CHECK_THAT(c.back(), WithinAbs(1.0 + harmonic(n) / static_cast<double>(n), 1e-12));
        // zero padding at the first point: only j = 0 terms survive
        CHECK_THAT(c[0], WithinAbs(harmonic(n) / static_cast<double>(n), 1e-12));
    }
}

TEST_CASE("carm is linear and preserves nonnegativity") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(25), y(25), mix(25);
        const double a = z(rng), b = z(rng);
        for (std::size_t t = 0; t < 25; ++t) {
            x[t] = z(rng);
            y[t] = z(rng);
            mix[t] = a * x[t] + b * y[t];
        }
        const CarmConfig cfg{static_cast<std::size_t>(1 + rep % 12), false};
        const auto cx = carm(x, cfg), cy = carm(y, cfg), cm = carm(mix, cfg);
        for (std::size_t t = 0; t < 25; ++t) CHECK_THAT(cm[t], WithinAbs(a * cx[t] + b * cy[t], 1e-12));

        for (auto& v : x) v = std::abs(v);
        for (double v : carm(x, cfg)) CHECK(v >= 0.0);
    }
    CHECK_THROWS_AS(carm(std::vector<double>{1.0}, {0, false}), InvalidArgument);
}

TEST_CASE("median_normalize divides by the median of positive entries") {
    auto r = median_normalize(std::vector<double>{1, 2, 3});
    CHECK(r.median == 2.0);
    CHECK(r.values == std::vector<double>{0.5, 1.0, 1.5});
    CHECK_FALSE(r.degenerate);

    r = median_normalize(std::vector<double>{0, 0, 4});
    CHECK(r.values == std::vector<double>{0, 0, 1});

    r = median_normalize(std::vector<double>{4, 0, 1, 3, 2});
    CHECK(r.median == 2.5);

    r = median_normalize(std::vector<double>{0, 0, 0});
    CHECK(r.degenerate);
    CHECK(r.values == std::vector<double>{0, 0, 0});

    const auto normalized = carm(std::vector<double>{0, 1, 0, 2}, {1, true});
    const auto raw = carm(std::vector<double>{0, 1, 0, 2}, {1, false});
    CHECK(normalized == median_normalize(raw).values);
}

TEST_CASE("rolling_scan emits one point per full window") {
    std::mt19937_64 rng(21);
    const auto panel = synthetic::factor_panel(rng, 4, std::vector<double>(36, 0.01));
    const auto s = rolling_scan(panel, 12, LambdaGrid::uniform(11));
    REQUIRE(s.points.size() == 25);
    CHECK(s.points.front().date == panel.dates()[11]);
    CHECK(s.points.back().date == panel.dates()[35]);
    for (const auto& p : s.points) {
        CHECK(std::abs(p.integrated_m) <= 1.0);
        CHECK((p.zero_event >= 0.0 && p.zero_event <= 1.0));
        CHECK((p.max_event >= 0.0 && p.max_event <= 1.0));
        CHECK_FALSE(p.magnetization_curve.has_value());
    }

    const auto with_curves = rolling_scan(panel, 30, LambdaGrid::uniform(11), {}, {true, 1});
    REQUIRE(with_curves.points.size() == 7);
    CHECK(with_curves.points[0].magnetization_curve->size() == 11);

    CHECK_THROWS_AS(rolling_scan(panel, 37, LambdaGrid::uniform(11)), InsufficientHistory);
    CHECK_THROWS_AS(rolling_scan(panel, 1, LambdaGrid::uniform(11)), InvalidArgument);
}

TEST_CASE("rolling_scan results do not depend on thread count") {
    std::mt19937_64 rng(22);
    const auto panel = synthetic::factor_panel(rng, 6, std::vector<double>(30, 0.0));
    const auto a = rolling_scan(panel, 12, LambdaGrid::uniform(21), {}, {true, 1});
    const auto b = rolling_scan(panel, 12, LambdaGrid::uniform(21), {}, {true, 4});
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k) {
        CHECK(a.points[k].integrated_m == b.points[k].integrated_m);
        CHECK(*a.points[k].magnetization_curve == *b.points[k].magnetization_curve);
    }
}

TEST_CASE("strongly bullish panel gives positive M; mirrored panel negates it") {
    std::mt19937_64 rng(23);
    const auto bull = synthetic::factor_panel(rng, 5, std::vector<double>(30, 0.03), {0.02, 0.02});
    const auto grid = LambdaGrid::uniform(51);
    const auto s = rolling_scan(bull, 12, grid, exact_config());
    for (const auto& p : s.points) CHECK(p.integrated_m > 0.0);

    const ReturnPanel bear(bull.dates(), bull.assets(), -bull.returns());
    const auto mirrored = rolling_scan(bear, 12, grid, exact_config());
    for (std::size_t k = 0; k < s.points.size(); ++k)
        CHECK_THAT(mirrored.points[k].integrated_m, WithinAbs(-s.points[k].integrated_m, 1e-8));
}
