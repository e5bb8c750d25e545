// simplex_qp.hpp
// Primal active-set solver for a convex quadratic over the probability simplex:
//
//     minimize  x' Q x + c' x   subject to  x >= 0,  sum(x) = 1
//
// Q must be symmetric positive semidefinite; singular Q is handled by moving
// along zero-curvature descent directions until a bound blocks.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvmag/error.hpp"

namespace mvmag {

struct SimplexQpResult {
    Eigen::VectorXd x;
    double objective = 0.0;
    // Common gradient value on the support (the equality multiplier).
    double multiplier = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
};

namespace detail {

// Largest violation of the simplex KKT conditions at x:
// g_i = mu on the support, g_i >= mu off it, with g = 2Qx + c.
inline double simplex_kkt_residual(const Eigen::VectorXd& g, const std::vector<char>& free, double mu) {
    double r = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (free[static_cast<std::size_t>(i)])
            r = std::max(r, std::abs(g[i] - mu));
        else
            r = std::max(r, mu - g[i]);
    }
    return r;
}

inline double support_mean(const Eigen::VectorXd& g, const std::vector<char>& free) {
    double s = 0.0;
    int k = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (free[static_cast<std::size_t>(i)]) {
            s += g[i];
            ++k;
        }
    return k ? s / k : 0.0;
}

}  // namespace detail

// `warm_start`, when non-empty, must be a feasible point; its support seeds the
// working set. Throws SolverError if the KKT residual cannot be brought below
// `kkt_tolerance`.
inline SimplexQpResult minimize_on_simplex(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c, double kkt_tolerance,
                                           const Eigen::VectorXd& warm_start = {}) {
    const Eigen::Index n = c.size();
    if (n == 0) throw InvalidArgument("simplex QP needs at least one variable");
    if (Q.rows() != n || Q.cols() != n) throw DimensionMismatch("simplex QP: Q is not n x n");
    if (!(kkt_tolerance > 0.0)) throw InvalidArgument("simplex QP: kkt tolerance must be positive");

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<char> free(static_cast<std::size_t>(n), 0);

    const bool warm_ok = warm_start.size() == n && warm_start.minCoeff() >= 0.0 &&
                         std::abs(warm_start.sum() - 1.0) <= 1e-9;
    if (warm_ok) {
        x = warm_start / warm_start.sum();
        for (Eigen::Index i = 0; i < n; ++i) free[static_cast<std::size_t>(i)] = x[i] > 0.0;
    } else {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < n; ++i)
            if (Q(i, i) + c[i] < Q(best, best) + c[best]) best = i;
        x[best] = 1.0;
        free[static_cast<std::size_t>(best)] = 1;
    }

    const double face_tol = 1e-2 * kkt_tolerance;
    const int max_iter = 100 + 20 * static_cast<int>(n);
    std::vector<Eigen::Index> support;
    Eigen::VectorXd g(n), d(n);
    int iter = 0;

    for (; iter < max_iter; ++iter) {
        g.noalias() = 2.0 * (Q * x) + c;
        support.clear();
        for (Eigen::Index i = 0; i < n; ++i)
            if (free[static_cast<std::size_t>(i)]) support.push_back(i);
        const auto k = static_cast<Eigen::Index>(support.size());
        const double mu = detail::support_mean(g, free);

        double face_residual = 0.0;
        for (auto i : support) face_residual = std::max(face_residual, std::abs(g[i] - mu));

        if (face_residual <= face_tol) {
            Eigen::Index enter = -1;
            double most_negative = -kkt_tolerance;
            for (Eigen::Index i = 0; i < n; ++i)
                if (!free[static_cast<std::size_t>(i)] && g[i] - mu < most_negative) {
                    most_negative = g[i] - mu;
                    enter = i;
                }
            if (enter < 0) break;
            free[static_cast<std::size_t>(enter)] = 1;
            continue;
        }

        // Reduced coordinates on the face: the last support index absorbs the
        // equality constraint, x_r = 1 - sum of the others.
        const Eigen::Index m = k - 1;
        const Eigen::Index r = support.back();
        Eigen::MatrixXd hr(m, m);
        Eigen::VectorXd gr(m);
        for (Eigen::Index a = 0; a < m; ++a) {
            const auto ia = support[static_cast<std::size_t>(a)];
            gr[a] = g[ia] - g[r];
            for (Eigen::Index b = 0; b < m; ++b) {
                const auto ib = support[static_cast<std::size_t>(b)];
                hr(a, b) = 2.0 * (Q(ia, ib) - Q(ia, r) - Q(r, ib) + Q(r, r));
            }
        }

        Eigen::VectorXd y;
        bool ray = false;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(hr);
        const auto diag = ldlt.vectorD();
        if (ldlt.info() == Eigen::Success && diag.minCoeff() > 1e-10 * diag.cwiseAbs().maxCoeff()) {
            y = -ldlt.solve(gr);
        } else {
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hr);
            const auto& ev = es.eigenvalues();
            const auto& vec = es.eigenvectors();
            const double cut = 1e-10 * ev.cwiseAbs().maxCoeff();
            Eigen::VectorXd newton = Eigen::VectorXd::Zero(m);
            Eigen::VectorXd flat = Eigen::VectorXd::Zero(m);
            for (Eigen::Index e = 0; e < m; ++e) {
                const double proj = vec.col(e).dot(gr);
                if (ev[e] > cut && ev[e] > 0.0)
                    newton -= (proj / ev[e]) * vec.col(e);
                else
                    flat -= proj * vec.col(e);
            }
            ray = flat.norm() > face_tol;
            y = ray ? flat : newton;
        }

        d.setZero();
        double ysum = 0.0;
        for (Eigen::Index a = 0; a < m; ++a) {
            d[support[static_cast<std::size_t>(a)]] = y[a];
            ysum += y[a];
        }
        d[r] = -ysum;

        double alpha = ray ? std::numeric_limits<double>::infinity() : 1.0;
        Eigen::Index blocking = -1;
        for (auto i : support)
            if (d[i] < 0.0) {
                const double ratio = x[i] / -d[i];
                if (ratio < alpha) {
                    alpha = ratio;
                    blocking = i;
                }
            }
        if (!std::isfinite(alpha)) break;  // flat ray without a blocking bound: numerically zero direction

        x += alpha * d;
        if (blocking >= 0) {
            x[blocking] = 0.0;
            free[static_cast<std::size_t>(blocking)] = 0;
        }
        for (auto i : support)
            if (x[i] <= 0.0) {
                x[i] = 0.0;
                free[static_cast<std::size_t>(i)] = 0;
            }
        x /= x.sum();
    }

    g.noalias() = 2.0 * (Q * x) + c;
    SimplexQpResult result;
    result.multiplier = detail::support_mean(g, free);
    result.kkt_residual = detail::simplex_kkt_residual(g, free, result.multiplier);
    result.iterations = iter;
    result.objective = x.dot(Q * x) + c.dot(x);
    result.x = std::move(x);
    if (!(result.kkt_residual <= kkt_tolerance))
        throw SolverError("simplex QP did not reach KKT tolerance (residual " + std::to_string(result.kkt_residual) +
                          " after " + std::to_string(iter) + " iterations)");
    return result;
}

}  // namespace mvmag
