// data_ingest.hpp
// Price table parsing, monthly resampling, simple returns, rolling windows
// and per-window moment estimation.

#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mvmag/error.hpp"

namespace mvmag {

using Date = std::chrono::year_month_day;

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            return cells;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace detail

// Parses a strict ISO date "YYYY-MM-DD". Returns false on any deviation.
inline bool parse_date(std::string_view s, Date& out) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    int y = 0;
    unsigned m = 0, d = 0;
    if (!detail::parse_int(s.substr(0, 4), y) || !detail::parse_int(s.substr(5, 2), m) ||
        !detail::parse_int(s.substr(8, 2), d))
        return false;
    out = Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    return out.ok();
}

inline std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

// Dated, complete panel of strictly positive prices. Rows are dates,
// columns are assets.
class PricePanel {
public:
    PricePanel(std::vector<Date> dates, std::vector<std::string> assets, Eigen::MatrixXd prices)
        : dates_(std::move(dates)), assets_(std::move(assets)), prices_(std::move(prices)) {
        if (prices_.rows() != static_cast<Eigen::Index>(dates_.size()) ||
            prices_.cols() != static_cast<Eigen::Index>(assets_.size()))
            throw DimensionMismatch("price matrix shape does not match dates x assets");
        if (dates_.size() < 2) throw InvalidArgument("price panel needs at least 2 dates");
        if (assets_.size() < 2) throw InvalidArgument("price panel needs at least 2 assets");
        for (std::size_t t = 1; t < dates_.size(); ++t)
            if (!(dates_[t - 1] < dates_[t])) throw InvalidArgument("dates not strictly increasing");
        for (Eigen::Index t = 0; t < prices_.rows(); ++t)
            for (Eigen::Index i = 0; i < prices_.cols(); ++i)
                if (!std::isfinite(prices_(t, i)) || prices_(t, i) <= 0.0)
                    throw InvalidArgument("non-positive price for asset '" + assets_[i] + "' on " +
                                          format_date(dates_[t]));
    }

    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<std::string>& assets() const { return assets_; }
    const Eigen::MatrixXd& prices() const { return prices_; }
    std::size_t rows() const { return dates_.size(); }
    std::size_t asset_count() const { return assets_.size(); }

    bool operator==(const PricePanel&) const = default;

private:
    std::vector<Date> dates_;
    std::vector<std::string> assets_;
    Eigen::MatrixXd prices_;
};

// Simple per-period returns; row t belongs to the later date of each price pair.
class ReturnPanel {
public:
    ReturnPanel(std::vector<Date> dates, std::vector<std::string> assets, Eigen::MatrixXd returns)
        : dates_(std::move(dates)), assets_(std::move(assets)), returns_(std::move(returns)) {
        if (returns_.rows() != static_cast<Eigen::Index>(dates_.size()) ||
            returns_.cols() != static_cast<Eigen::Index>(assets_.size()))
            throw DimensionMismatch("return matrix shape does not match dates x assets");
        if (dates_.empty() || assets_.empty()) throw InvalidArgument("empty return panel");
        for (std::size_t t = 1; t < dates_.size(); ++t)
            if (!(dates_[t - 1] < dates_[t])) throw InvalidArgument("dates not strictly increasing");
        for (Eigen::Index t = 0; t < returns_.rows(); ++t)
            for (Eigen::Index i = 0; i < returns_.cols(); ++i)
                if (!std::isfinite(returns_(t, i)) || returns_(t, i) <= -1.0)
                    throw InvalidArgument("return <= -1 for asset '" + assets_[i] + "'");
    }

    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<std::string>& assets() const { return assets_; }
    const Eigen::MatrixXd& returns() const { return returns_; }
    std::size_t rows() const { return dates_.size(); }
    std::size_t asset_count() const { return assets_.size(); }

private:
    std::vector<Date> dates_;
    std::vector<std::string> assets_;
    Eigen::MatrixXd returns_;
};

// Mean-return vector and covariance matrix of one window. The covariance
// must be symmetric and positive semidefinite up to round-off.
class MarketMoment {
public:
    static constexpr double kSymmetryTolerance = 1e-12;
    static constexpr double kPsdTolerance = 1e-10;

    MarketMoment(Eigen::VectorXd mean_returns, Eigen::MatrixXd covariance)
        : mean_(std::move(mean_returns)), cov_(std::move(covariance)) {
        const auto n = mean_.size();
        if (n < 1) throw InvalidArgument("market moment needs at least one asset");
        if (cov_.rows() != n || cov_.cols() != n)
            throw DimensionMismatch("covariance is not N x N for N = " + std::to_string(n));
        if (!mean_.allFinite() || !cov_.allFinite()) throw InvalidArgument("non-finite moment entries");
        if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance)
            throw InvalidArgument("covariance not symmetric");
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov_, Eigen::EigenvaluesOnly);
        const double largest = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
        if (eig.eigenvalues().minCoeff() < -kPsdTolerance * largest)
            throw NonPsdCovariance("covariance has eigenvalue " + std::to_string(eig.eigenvalues().minCoeff()) +
                                   " below the PSD tolerance");
    }

    std::size_t asset_count() const { return static_cast<std::size_t>(mean_.size()); }
    const Eigen::VectorXd& mean_returns() const { return mean_; }
    const Eigen::MatrixXd& covariance() const { return cov_; }

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
};

// Reads the wide CSV format `date,<asset>...` with one `YYYY-MM-DD,<price>...`
// row per date. Throws ParseError with the offending line and column.
inline PricePanel parse_price_table(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> assets;

    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (!detail::trim(line).empty()) break;
    }
    if (detail::trim(line).empty()) throw ParseError("missing header row", lineno);

    const auto header = detail::split_commas(line);
    if (header.front() != "date") throw ParseError("header must start with 'date'", lineno);
    std::set<std::string, std::less<>> seen;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].empty()) throw ParseError("empty asset name in header", lineno);
        if (!seen.emplace(header[c]).second)
            throw ParseError("duplicate asset name in header", lineno, std::string(header[c]));
        assets.emplace_back(header[c]);
    }
    if (assets.size() < 2) throw ParseError("header must name at least 2 assets", lineno);

    std::vector<Date> dates;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_commas(line);
        if (cells.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " cells, found " +
                                 std::to_string(cells.size()),
                             lineno);
        Date d;
        if (!parse_date(cells[0], d)) throw ParseError("invalid date '" + std::string(cells[0]) + "'", lineno, "date");
        if (!dates.empty() && !(dates.back() < d)) throw ParseError("dates not strictly increasing", lineno, "date");
        dates.push_back(d);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const auto cell = cells[c];
            if (cell.empty()) throw ParseError("missing price", lineno, assets[c - 1]);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
                throw ParseError("non-numeric price '" + std::string(cell) + "'", lineno, assets[c - 1]);
            if (v <= 0.0) throw ParseError("non-positive price '" + std::string(cell) + "'", lineno, assets[c - 1]);
            values.push_back(v);
        }
    }
    if (dates.size() < 2) throw ParseError("price table needs at least 2 data rows", lineno);

    Eigen::MatrixXd prices(static_cast<Eigen::Index>(dates.size()), static_cast<Eigen::Index>(assets.size()));
    for (Eigen::Index t = 0; t < prices.rows(); ++t)
        for (Eigen::Index i = 0; i < prices.cols(); ++i)
            prices(t, i) = values[static_cast<std::size_t>(t * prices.cols() + i)];
    return PricePanel(std::move(dates), std::move(assets), std::move(prices));
}

inline PricePanel parse_price_table(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_price_table(in);
}

// One row per calendar month, carrying the last observation of that month.
inline PricePanel resample_monthly(const PricePanel& panel) {
    std::vector<Date> dates;
    std::vector<Eigen::Index> keep;
    const auto& src = panel.dates();
    for (std::size_t t = 0; t < src.size(); ++t) {
        const bool last_of_month = t + 1 == src.size() || src[t + 1].year() != src[t].year() ||
                                   src[t + 1].month() != src[t].month();
        if (last_of_month) {
            dates.push_back(src[t]);
            keep.push_back(static_cast<Eigen::Index>(t));
        }
    }
    if (dates.size() < 2) throw InsufficientHistory("price panel spans fewer than 2 calendar months");
    Eigen::MatrixXd prices(static_cast<Eigen::Index>(keep.size()), panel.prices().cols());
    for (std::size_t r = 0; r < keep.size(); ++r) prices.row(static_cast<Eigen::Index>(r)) = panel.prices().row(keep[r]);
    return PricePanel(std::move(dates), panel.assets(), std::move(prices));
}

// Throws unless consecutive rows fall in consecutive calendar months.
inline void require_contiguous_months(const std::vector<Date>& dates) {
    using namespace std::chrono;
    for (std::size_t t = 1; t < dates.size(); ++t) {
        const auto prev = year_month{dates[t - 1].year(), dates[t - 1].month()};
        const auto cur = year_month{dates[t].year(), dates[t].month()};
        if (prev + months{1} != cur)
            throw InvalidArgument("monthly series has a gap between " + format_date(dates[t - 1]) + " and " +
                                  format_date(dates[t]));
    }
}

inline ReturnPanel compute_returns(const PricePanel& panel) {
    if (panel.rows() < 2) throw InsufficientHistory("need at least 2 price rows to compute returns");
    const auto& p = panel.prices();
    const Eigen::Index t = p.rows() - 1;
    Eigen::MatrixXd r = p.bottomRows(t).array() / p.topRows(t).array() - 1.0;
    std::vector<Date> dates(panel.dates().begin() + 1, panel.dates().end());
    return ReturnPanel(std::move(dates), panel.assets(), std::move(r));
}

// Trailing window of `window_len` return rows ending at `end_index` (inclusive).
inline ReturnPanel slice_window(const ReturnPanel& panel, std::size_t end_index, std::size_t window_len) {
    if (window_len < 2) throw InvalidArgument("window length must be at least 2");
    if (end_index >= panel.rows())
        throw InvalidArgument("window end index " + std::to_string(end_index) + " past panel end");
    if (end_index + 1 < window_len)
        throw InsufficientHistory("window of " + std::to_string(window_len) + " rows ending at row " +
                                  std::to_string(end_index) + " needs earlier history");
    const auto first = end_index + 1 - window_len;
    std::vector<Date> dates(panel.dates().begin() + static_cast<std::ptrdiff_t>(first),
                            panel.dates().begin() + static_cast<std::ptrdiff_t>(end_index + 1));
    Eigen::MatrixXd rows = panel.returns().middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(window_len));
    return ReturnPanel(std::move(dates), panel.assets(), std::move(rows));
}

// Sample mean and 1/(T-1) sample covariance, symmetrized.
inline MarketMoment estimate_moment(const ReturnPanel& window) {
    const auto& x = window.returns();
    if (x.rows() < 2) throw InsufficientHistory("moment estimation needs at least 2 return rows");
    Eigen::VectorXd mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
    cov = 0.5 * (cov + cov.transpose()).eval();
    return MarketMoment(std::move(mean), std::move(cov));
}

}  // namespace mvmag
