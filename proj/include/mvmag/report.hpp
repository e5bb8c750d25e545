// report.hpp
// CSV / JSON serialization of frontier curves and indicator scans.

#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mvmag/indicators.hpp"

namespace mvmag {

// Shortest decimal form that parses back to the same double (<= 17 significant digits).
inline std::string format_number(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct RunManifest {
    std::string input_path;
    std::size_t window_months = 12;
    std::size_t lambda_points = 101;
    std::size_t carm_horizon = 12;
    std::uint64_t seed = SolverConfig{}.rng_seed;
    int restarts = SolverConfig{}.random_restarts;
    bool exact = false;
    std::string output_format = "csv";
    std::string output_path;
    std::string curves_path;

    void validate() const {
        if (window_months < 2) throw InvalidArgument("window must be at least 2 months");
        if (lambda_points < 2) throw InvalidArgument("lambda points must be at least 2");
        if (carm_horizon < 1) throw InvalidArgument("CARM horizon must be at least 1");
        if (restarts < 0) throw InvalidArgument("restarts must be >= 0");
        if (output_format != "csv" && output_format != "json")
            throw InvalidArgument("format must be csv or json, got '" + output_format + "'");
    }

    SolverConfig solver_config() const {
        SolverConfig cfg;
        cfg.rng_seed = seed;
        cfg.random_restarts = restarts;
        cfg.strategy = exact ? SearchStrategy::exhaustive : SearchStrategy::local_search;
        return cfg;
    }

    nlohmann::ordered_json to_json() const {
        return {{"input", input_path},
                {"window_months", window_months},
                {"lambda_points", lambda_points},
                {"carm_horizon", carm_horizon},
                {"seed", seed},
                {"restarts", restarts},
                {"solver", exact ? "exact" : "heuristic"},
                {"format", output_format}};
    }
};

// ---------------------------------------------------------------------------
// Single-window frontier

inline void write_frontier_csv(std::ostream& out, const FrontierCurve& curve) {
    out << "lambda,magnetization,hamiltonian,return,variance\n";
    for (std::size_t k = 0; k < curve.states.size(); ++k) {
        const auto& s = curve.states[k];
        out << format_number(curve.grid[k]) << ',' << format_number(curve.magnetizations[k]) << ','
            << format_number(s.hamiltonian_value) << ',' << format_number(s.expected_return) << ','
            << format_number(s.variance) << '\n';
    }
    const auto ev = detect_events(curve);
    out << "\nintegrated_m,zero_event,max_event\n"
        << format_number(integrated_magnetization(curve)) << ',' << format_number(ev.zero_event) << ','
        << format_number(ev.max_event) << '\n';
}

inline nlohmann::ordered_json frontier_json(const RunManifest& manifest, const FrontierCurve& curve, const Date& end) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < curve.states.size(); ++k) {
        const auto& s = curve.states[k];
        rows.push_back({{"lambda", curve.grid[k]},
                        {"magnetization", curve.magnetizations[k]},
                        {"hamiltonian", s.hamiltonian_value},
                        {"return", s.expected_return},
                        {"variance", s.variance},
                        {"weights", std::vector<double>(s.portfolio.weights().begin(), s.portfolio.weights().end())}});
    }
    const auto ev = detect_events(curve);
    nlohmann::ordered_json crossings = nlohmann::ordered_json::array();
    for (const auto& c : zero_crossings(curve))
        crossings.push_back({{"lambda", c.lambda}, {"lower_index", c.lower}, {"upper_index", c.upper}});
    return {{"manifest", manifest.to_json()},
            {"window_end", format_date(end)},
            {"series", std::move(rows)},
            {"summary",
             {{"integrated_m", integrated_magnetization(curve)},
              {"zero_event", ev.zero_event},
              {"max_event", ev.max_event},
              {"zero_crossings", std::move(crossings)}}}};
}

// ---------------------------------------------------------------------------
// Rolling scan

struct ScanRow {
    Date date;
    double integrated_m;
    double zero_event;
    double max_event;
    double carm_zero;
    double carm_max;
    double carm_max_normalized;
};

struct ScanTable {
    std::vector<ScanRow> rows;
    NormalizedSeries normalization;
};

inline ScanTable build_scan_table(const IndicatorSeries& series, std::size_t carm_horizon) {
    std::vector<double> e, ep;
    for (const auto& p : series.points) {
        e.push_back(p.zero_event);
        ep.push_back(p.max_event);
    }
    const CarmConfig cfg{carm_horizon, false};
    const auto ce = carm(e, cfg);
    const auto cep = carm(ep, cfg);
    ScanTable table{{}, median_normalize(cep)};
    for (std::size_t k = 0; k < series.points.size(); ++k) {
        const auto& p = series.points[k];
        table.rows.push_back(
            {p.date, p.integrated_m, p.zero_event, p.max_event, ce[k], cep[k], table.normalization.values[k]});
    }
    return table;
}

inline void write_scan_csv(std::ostream& out, const ScanTable& table) {
    out << "date,M,E,E_prime,carm_E,carm_E_prime,carm_E_prime_normalized\n";
    for (const auto& r : table.rows)
        out << format_date(r.date) << ',' << format_number(r.integrated_m) << ',' << format_number(r.zero_event) << ','
            << format_number(r.max_event) << ',' << format_number(r.carm_zero) << ',' << format_number(r.carm_max)
            << ',' << format_number(r.carm_max_normalized) << '\n';
}

// Heat-map layout: one row per window end, one column per lambda, cells m(lambda).
inline void write_curves_csv(std::ostream& out, const IndicatorSeries& series, const LambdaGrid& grid) {
    out << "date";
    for (double l : grid.values()) out << ',' << format_number(l);
    out << '\n';
    for (const auto& p : series.points) {
        out << format_date(p.date);
        if (p.magnetization_curve)
            for (double m : *p.magnetization_curve) out << ',' << format_number(m);
        out << '\n';
    }
}

inline nlohmann::ordered_json scan_json(const RunManifest& manifest, const ScanTable& table,
                                        const IndicatorSeries* curves = nullptr, const LambdaGrid* grid = nullptr) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"date", format_date(r.date)},
                        {"M", r.integrated_m},
                        {"E", r.zero_event},
                        {"E_prime", r.max_event},
                        {"carm_E", r.carm_zero},
                        {"carm_E_prime", r.carm_max},
                        {"carm_E_prime_normalized", r.carm_max_normalized}});
    nlohmann::ordered_json doc{{"manifest", manifest.to_json()},
                               {"series", std::move(rows)},
                               {"normalization",
                                {{"median", table.normalization.median},
                                 {"degenerate", table.normalization.degenerate}}}};
    if (curves && grid) {
        nlohmann::ordered_json c = nlohmann::ordered_json::array();
        for (const auto& p : curves->points)
            c.push_back({{"date", format_date(p.date)},
                         {"magnetization", p.magnetization_curve.value_or(std::vector<double>{})}});
        doc["lambda"] = grid->values();
        doc["curves"] = std::move(c);
    }
    return doc;
}

}  // namespace mvmag
