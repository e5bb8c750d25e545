#include <catch_amalgamated.hpp>

#include <random>

#include "mvmag/model.hpp"
#include "mvmag/synthetic.hpp"

using namespace mvmag;
using Catch::Matchers::WithinAbs;

namespace {

MarketMoment moment(Eigen::VectorXd r, Eigen::MatrixXd c) { return MarketMoment(std::move(r), std::move(c)); }

Portfolio pf(std::initializer_list<double> w) { return validate_budget(std::vector<double>(w)); }

Portfolio random_portfolio(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    for (auto& v : w) v = u(rng);
    return validate_budget(Eigen::VectorXd(w / w.cwiseAbs().sum()));
}

}  // namespace

TEST_CASE("portfolio_return is the weighted mean return") {
    const auto m = moment(Eigen::Vector2d(0.02, 0.04), Eigen::Matrix2d::Identity());
    CHECK(portfolio_return(pf({1.0, 0.0}), m) == 0.02);
    CHECK_THAT(portfolio_return(pf({0.5, -0.5}), m), WithinAbs(-0.01, 1e-17));
    CHECK(portfolio_return(pf({0.0, -1.0}), m) == -0.04);
    CHECK_THROWS_AS(portfolio_return(pf({0.5, 0.25, 0.25}), m), DimensionMismatch);
}

TEST_CASE("portfolio_variance is the quadratic form") {
    const auto id = moment(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity());
    CHECK(portfolio_variance(pf({0.5, -0.5}), id) == 0.5);
    // 0.64 * 1 + 0.04 * 4
    const auto d = moment(Eigen::Vector2d::Zero(), Eigen::Vector2d(1.0, 4.0).asDiagonal());
    CHECK_THAT(portfolio_variance(pf({0.8, 0.2}), d), WithinAbs(0.8, 1e-15));
    const auto zero = moment(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Zero());
    CHECK(portfolio_variance(pf({0.3, -0.7}), zero) == 0.0);
    CHECK_THROWS_AS(portfolio_variance(pf({1.0}), zero), DimensionMismatch);
}

TEST_CASE("hamiltonian blends return and variance") {
    const auto m = moment(Eigen::Vector2d(0.02, 0.04), Eigen::Matrix2d::Identity());
    const auto p = pf({0.5, -0.5});
    CHECK(hamiltonian(p, m, LambdaValue(0.0)) == portfolio_variance(p, m));
    CHECK(hamiltonian(p, m, LambdaValue(1.0)) == -portfolio_return(p, m));

    const auto m2 = moment(Eigen::Vector2d(0.02, 0.02), Eigen::Matrix2d::Identity());
    // return 0.02, variance 0.5 at lambda 0.5
    const auto q = pf({1.0, 0.0});
    const auto half = moment(Eigen::Vector2d(0.02, 0.0), Eigen::Vector2d(0.5, 1.0).asDiagonal());
    CHECK_THAT(hamiltonian(q, half, LambdaValue(0.5)), WithinAbs(0.24, 1e-15));
    CHECK_THROWS_AS(hamiltonian(pf({1.0}), m2, LambdaValue(0.5)), DimensionMismatch);
}

TEST_CASE("magnetization sums the weights") {
    CHECK(magnetization(pf({0.5, -0.5})) == 0.0);
    CHECK(magnetization(pf({0.3, 0.7})) == 1.0);
    CHECK(magnetization(pf({-0.4, -0.6})) == -1.0);
}

TEST_CASE("validate_budget enforces sum |w| = 1") {
    CHECK(validate_budget(std::vector<double>{1.0}).size() == 1);
    try {
        validate_budget(std::vector<double>{0.6, 0.6});
        FAIL("expected BudgetViolation");
    } catch (const BudgetViolation& e) {
        CHECK_THAT(e.l1_norm, WithinAbs(1.2, 1e-15));
    }
    CHECK_NOTHROW(validate_budget(std::vector<double>{0.25, -0.25, 0.5}));
    CHECK_NOTHROW(validate_budget(std::vector<double>{0.5, 0.5 + 5e-11}));
    CHECK_THROWS_AS(validate_budget(std::vector<double>{0.5, 0.5 + 5e-10}), BudgetViolation);
    CHECK_THROWS_AS(validate_budget(std::vector<double>{}), InvalidArgument);
}

TEST_CASE("LambdaValue is restricted to [0, 1]") {
    CHECK_THROWS_AS(LambdaValue(-0.01), InvalidArgument);
    CHECK_THROWS_AS(LambdaValue(1.0001), InvalidArgument);
    CHECK_THROWS_AS(LambdaValue(std::nan("")), InvalidArgument);
    CHECK(LambdaValue(0.25).value() == 0.25);
}

TEST_CASE("objective properties on random instances") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + rep % 7;
        const auto m = synthetic::random_moment(rng, n);
        const auto p = random_portfolio(rng, n);
        const LambdaValue lam(u(rng));

        CHECK(std::abs(magnetization(p)) <= 1.0);
        CHECK(portfolio_variance(p, m) >= 0.0);

        const double h0 = hamiltonian(p, m, LambdaValue(0.0));
        const double h1 = hamiltonian(p, m, LambdaValue(1.0));
        CHECK_THAT(hamiltonian(p, m, lam), WithinAbs(h0 + lam * (h1 - h0), 1e-15));

        const MarketMoment mirrored(-m.mean_returns(), m.covariance());
        CHECK_THAT(hamiltonian(-p, mirrored, lam), WithinAbs(hamiltonian(p, m, lam), 1e-16));
    }
}
