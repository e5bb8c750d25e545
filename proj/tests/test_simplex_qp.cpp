#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "mvmag/simplex_qp.hpp"

using namespace mvmag;
using Catch::Matchers::WithinAbs;

namespace {

// Euclidean projection onto the probability simplex (sort-based).
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<>{});
    double cum = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cum += u[j];
        const double t = (cum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
    }
    return (v.array() - theta).max(0.0).matrix();
}

// Independent reference: plain projected gradient descent with step 1/L.
double projected_gradient_minimum(const Eigen::MatrixXd& q, const Eigen::VectorXd& c) {
    const auto n = c.size();
    const double lip = 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues().cwiseAbs().maxCoeff() + 1e-12;
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    for (int it = 0; it < 200000; ++it) x = project_to_simplex(x - (2.0 * q * x + c) / lip);
    return x.dot(q * x) + c.dot(x);
}

Eigen::MatrixXd random_psd(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank) {
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd a(rank, n);
    for (auto& v : a.reshaped()) v = z(rng);
    return a.transpose() * a / static_cast<double>(rank);
}

}  // namespace

TEST_CASE("simplex QP closed-form cases") {
    SECTION("identity quadratic splits evenly") {
        const auto r = minimize_on_simplex(Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), 1e-9);
        CHECK_THAT(r.x[0], WithinAbs(0.5, 1e-14));
        CHECK_THAT(r.objective, WithinAbs(0.5, 1e-14));
    }
    SECTION("diag(1,4): stationarity 2x1 = 8x2 on x1 + x2 = 1") {
        const Eigen::Matrix2d q = Eigen::Vector2d(1.0, 4.0).asDiagonal();
        const auto r = minimize_on_simplex(q, Eigen::Vector2d::Zero(), 1e-9);
        CHECK_THAT(r.x[0], WithinAbs(0.8, 1e-14));
        CHECK_THAT(r.x[1], WithinAbs(0.2, 1e-14));
        CHECK_THAT(r.objective, WithinAbs(0.8, 1e-14));
    }
    SECTION("zero quadratic picks the best vertex") {
        const auto r = minimize_on_simplex(Eigen::Matrix2d::Zero(), Eigen::Vector2d(-0.02, -0.05), 1e-9);
        CHECK(r.x == Eigen::Vector2d(0.0, 1.0));
        CHECK(r.objective == -0.05);
    }
    SECTION("single variable") {
        const auto r = minimize_on_simplex(Eigen::Matrix<double, 1, 1>::Constant(3.0), Eigen::VectorXd::Constant(1, 2.0), 1e-9);
        CHECK(r.x[0] == 1.0);
    }
}

TEST_CASE("simplex QP matches projected gradient on random instances") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int rep = 0; rep < 40; ++rep) {
        const Eigen::Index n = 2 + rep % 8;
        const Eigen::Index rank = 1 + (rep * 7) % n;  // includes singular Q
        const Eigen::MatrixXd q = random_psd(rng, n, rank);
        Eigen::VectorXd c(n);
        for (auto& v : c) v = 0.5 * z(rng);
        const auto r = minimize_on_simplex(q, c, 1e-9);
        INFO("n = " << n << ", rank = " << rank);
        CHECK(r.kkt_residual <= 1e-9);
        CHECK(r.x.minCoeff() >= 0.0);
        CHECK_THAT(r.x.sum(), WithinAbs(1.0, 1e-14));
        CHECK(r.objective <= projected_gradient_minimum(q, c) + 1e-9);
    }
}

TEST_CASE("simplex QP handles flat directions of a singular quadratic") {
    // Rank-one Q: objective (x1 - x2)^2 + c'x, flat along x1 = x2 directions.
    Eigen::Matrix3d q;
    q << 1, -1, 0, -1, 1, 0, 0, 0, 0;
    const Eigen::Vector3d c(0.0, 0.0, 0.1);
    const auto r = minimize_on_simplex(q, c, 1e-9);
    CHECK_THAT(r.objective, WithinAbs(0.0, 1e-14));
    CHECK_THAT(r.x[0], WithinAbs(r.x[1], 1e-12));
    CHECK(r.x[2] == 0.0);

    // All-zero Q with a tie in c: stays on a vertex of the tied face.
    const auto t = minimize_on_simplex(Eigen::Matrix3d::Zero(), Eigen::Vector3d(-1.0, -1.0, 0.0), 1e-9);
    CHECK_THAT(t.objective, WithinAbs(-1.0, 1e-15));
}

TEST_CASE("simplex QP warm start reaches the same optimum") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::Index n = 3 + rep % 5;
        const Eigen::MatrixXd q = random_psd(rng, n, n);
        Eigen::VectorXd c(n);
        for (auto& v : c) v = z(rng);
        Eigen::VectorXd warm = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
        const auto cold = minimize_on_simplex(q, c, 1e-9);
        const auto hot = minimize_on_simplex(q, c, 1e-9, warm);
        CHECK_THAT(hot.objective, WithinAbs(cold.objective, 1e-12));
    }
}

TEST_CASE("simplex QP argument checks") {
    CHECK_THROWS_AS(minimize_on_simplex(Eigen::Matrix2d::Identity(), Eigen::Vector3d::Zero(), 1e-9), DimensionMismatch);
    CHECK_THROWS_AS(minimize_on_simplex(Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), 0.0), InvalidArgument);
    CHECK_THROWS_AS(minimize_on_simplex(Eigen::MatrixXd(0, 0), Eigen::VectorXd(0), 1e-9), InvalidArgument);
}
