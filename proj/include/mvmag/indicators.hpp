// indicators.hpp
// Rolling scan over trailing windows and the cumulative averaged rolling
// mean (CARM) filter applied to event series.

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "mvmag/data_ingest.hpp"
#include "mvmag/frontier.hpp"

namespace mvmag {

struct IndicatorPoint {
    Date date;
    double integrated_m;
    double zero_event;
    double max_event;
    std::optional<std::vector<double>> magnetization_curve;
};

struct IndicatorSeries {
    std::vector<IndicatorPoint> points;
};

struct ScanOptions {
    bool keep_curves = false;
    // Worker threads over windows; results do not depend on this.
    unsigned threads = 1;
};

// One indicator point per window end with at least `window_len` rows of
// history, in date order. A failing window aborts the scan.
inline IndicatorSeries rolling_scan(const ReturnPanel& panel, std::size_t window_len, const LambdaGrid& grid,
                                    const SolverConfig& cfg = {}, const ScanOptions& opts = {}) {
    cfg.validate();
    if (window_len < 2) throw InvalidArgument("window length must be at least 2");
    if (panel.rows() < window_len)
        throw InsufficientHistory("panel has " + std::to_string(panel.rows()) + " return rows, window needs " +
                                  std::to_string(window_len));

    const std::size_t count = panel.rows() - window_len + 1;
    std::vector<std::optional<IndicatorPoint>> slots(count);

    auto run_one = [&](std::size_t k) {
        const std::size_t end = k + window_len - 1;
        const auto& date = panel.dates()[end];
        try {
            const auto curve = sweep_frontier(estimate_moment(slice_window(panel, end, window_len)), grid, cfg);
            IndicatorPoint pt{date, integrated_magnetization(curve), detect_zero_event(curve), detect_max_event(curve),
                              std::nullopt};
            if (opts.keep_curves) pt.magnetization_curve = curve.magnetizations;
            slots[k] = std::move(pt);
        } catch (const Error& e) {
            throw SolverError("window ending " + format_date(date) + ": " + e.what());
        }
    };

    const unsigned threads = std::max(1U, std::min<unsigned>(opts.threads, static_cast<unsigned>(count)));
    if (threads == 1) {
        for (std::size_t k = 0; k < count; ++k) run_one(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::size_t failed_at = count;
        std::mutex mu;
        {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back([&] {
                    for (std::size_t k; (k = next.fetch_add(1)) < count;) {
                        try {
                            run_one(k);
                        } catch (...) {
                            std::lock_guard lock(mu);
                            if (k < failed_at) {
                                failed_at = k;
                                failure = std::current_exception();
                            }
                        }
                    }
                });
        }
        if (failure) std::rethrow_exception(failure);
    }

    IndicatorSeries series;
    series.points.reserve(count);
    for (auto& s : slots) series.points.push_back(std::move(*s));
    return series;
}

struct NormalizedSeries {
    std::vector<double> values;
    double median = 1.0;
    // Set when the series has no positive entry; values are then unchanged.
    bool degenerate = false;
};

// Divides by Q, the median of the strictly positive entries.
inline NormalizedSeries median_normalize(std::span<const double> series) {
    std::vector<double> pos;
    for (double v : series)
        if (v > 0.0) pos.push_back(v);
    NormalizedSeries out{std::vector<double>(series.begin(), series.end()), 1.0, pos.empty()};
    if (pos.empty()) return out;
    std::sort(pos.begin(), pos.end());
    const std::size_t h = pos.size() / 2;
    out.median = pos.size() % 2 ? pos[h] : 0.5 * (pos[h - 1] + pos[h]);
    for (auto& v : out.values) v /= out.median;
    return out;
}

struct CarmConfig {
    std::size_t horizon_n = 12;
    bool normalize_by_median = false;
};

// CARM(t) = (1/N) sum_{i=1..N} sum_{j=0..i} E(t - j) / i, with one series step
// per j and E = 0 before the series start.
inline std::vector<double> carm(std::span<const double> events, const CarmConfig& cfg = {}) {
    if (cfg.horizon_n < 1) throw InvalidArgument("CARM horizon must be >= 1");
    const std::size_t n = cfg.horizon_n;
    std::vector<double> out(events.size(), 0.0);
    for (std::size_t t = 0; t < events.size(); ++t) {
        double total = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            double inner = 0.0;
            for (std::size_t j = 0; j <= i && j <= t; ++j) inner += events[t - j];
            total += inner / static_cast<double>(i);
        }
        out[t] = total / static_cast<double>(n);
    }
    if (cfg.normalize_by_median) return median_normalize(out).values;
    return out;
}

}  // namespace mvmag
