// synthetic.hpp
// Seeded generators for return panels and market moments, used by the
// self-test and the test suites.

#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mvmag/data_ingest.hpp"

namespace mvmag::synthetic {

// Month-end dates, `count` consecutive months starting at `first`.
inline std::vector<Date> month_ends(std::chrono::year_month first, std::size_t count) {
    std::vector<Date> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto ym = first + std::chrono::months{static_cast<int>(k)};
        out.emplace_back(std::chrono::year_month_day_last{ym.year(), std::chrono::month_day_last{ym.month()}});
    }
    return out;
}

inline std::vector<std::string> asset_names(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("A" + std::to_string(i + 1));
    return names;
}

struct FactorModel {
    double market_vol = 0.04;
    double idio_vol = 0.03;
};

// Monthly returns r_ti = mean_t + beta_i f_t + e_ti, with f and e Gaussian and
// betas drawn once in [0.5, 1.5]. `row_means[t]` is the drift of row t.
inline ReturnPanel factor_panel(std::mt19937_64& rng, std::size_t assets, std::span<const double> row_means,
                                const FactorModel& model = {}) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> beta_dist(0.5, 1.5);
    Eigen::VectorXd beta(static_cast<Eigen::Index>(assets));
    for (auto& b : beta) b = beta_dist(rng);
    Eigen::MatrixXd r(static_cast<Eigen::Index>(row_means.size()), static_cast<Eigen::Index>(assets));
    for (Eigen::Index t = 0; t < r.rows(); ++t) {
        const double f = model.market_vol * z(rng);
        for (Eigen::Index i = 0; i < r.cols(); ++i)
            r(t, i) = std::max(row_means[static_cast<std::size_t>(t)] + beta[i] * f + model.idio_vol * z(rng), -0.95);
    }
    return ReturnPanel(month_ends(std::chrono::year{2000} / std::chrono::January, row_means.size()),
                       asset_names(assets), std::move(r));
}

// Moment of `rows` random return rows over `assets` assets with random
// per-asset means of order `mean_scale`.
inline MarketMoment random_moment(std::mt19937_64& rng, std::size_t assets, std::size_t rows = 24,
                                  double mean_scale = 0.01) {
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::VectorXd mu(static_cast<Eigen::Index>(assets));
    for (auto& v : mu) v = mean_scale * z(rng);
    Eigen::MatrixXd r(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(assets));
    std::uniform_real_distribution<double> vol(0.02, 0.08);
    Eigen::VectorXd vols(static_cast<Eigen::Index>(assets));
    for (auto& v : vols) v = vol(rng);
    for (Eigen::Index t = 0; t < r.rows(); ++t) {
        const double f = 0.03 * z(rng);
        for (Eigen::Index i = 0; i < r.cols(); ++i) r(t, i) = mu[i] + f + vols[i] * z(rng);
    }
    return estimate_moment(ReturnPanel(month_ends(std::chrono::year{2000} / std::chrono::January, rows),
                                       asset_names(assets), std::move(r)));
}

// `bull` months drifting at +drift followed by `bear` months at -drift.
inline ReturnPanel regime_panel(std::mt19937_64& rng, std::size_t assets, std::size_t bull, std::size_t bear,
                                double drift = 0.02, const FactorModel& model = {}) {
    std::vector<double> means(bull, drift);
    means.insert(means.end(), bear, -drift);
    return factor_panel(rng, assets, means, model);
}

// Prices compounded from 100 so that compute_returns reproduces `panel`;
// the first date is one month before the first return row.
inline PricePanel prices_from_returns(const ReturnPanel& panel) {
    using namespace std::chrono;
    const auto& d0 = panel.dates().front();
    const auto first = year_month{d0.year(), d0.month()} - months{1};
    auto dates = month_ends(first, panel.rows() + 1);
    Eigen::MatrixXd p(static_cast<Eigen::Index>(panel.rows() + 1), static_cast<Eigen::Index>(panel.asset_count()));
    p.row(0).setConstant(100.0);
    for (Eigen::Index t = 0; t < panel.returns().rows(); ++t)
        p.row(t + 1) = p.row(t).array() * (1.0 + panel.returns().row(t).array());
    return PricePanel(std::move(dates), panel.assets(), std::move(p));
}

}  // namespace mvmag::synthetic
