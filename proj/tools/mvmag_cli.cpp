// mvmag_cli.cpp
// Command-line front end: single-window frontier, rolling scan, self-test.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "mvmag/mvmag.hpp"

namespace {

using mvmag::RunManifest;

mvmag::ReturnPanel load_monthly_returns(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mvmag::InvalidArgument("cannot open input file '" + path + "'");
    const auto monthly = mvmag::resample_monthly(mvmag::parse_price_table(in));
    mvmag::require_contiguous_months(monthly.dates());
    return mvmag::compute_returns(monthly);
}

// Writes to --output when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw mvmag::InvalidArgument("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

int cmd_frontier(const RunManifest& manifest) {
    manifest.validate();
    const auto returns = load_monthly_returns(manifest.input_path);
    const auto end = returns.rows() == 0 ? 0 : returns.rows() - 1;
    const auto window = mvmag::slice_window(returns, end, manifest.window_months);
    const auto curve = mvmag::sweep_frontier(mvmag::estimate_moment(window),
                                             mvmag::LambdaGrid::uniform(manifest.lambda_points),
                                             manifest.solver_config());
    Sink sink(manifest.output_path);
    if (manifest.output_format == "json")
        sink.stream() << mvmag::frontier_json(manifest, curve, returns.dates()[end]).dump(2) << '\n';
    else
        mvmag::write_frontier_csv(sink.stream(), curve);
    return 0;
}

int cmd_scan(const RunManifest& manifest, unsigned threads) {
    manifest.validate();
    const auto returns = load_monthly_returns(manifest.input_path);
    const auto grid = mvmag::LambdaGrid::uniform(manifest.lambda_points);
    const bool curves = !manifest.curves_path.empty();
    const auto series =
        mvmag::rolling_scan(returns, manifest.window_months, grid, manifest.solver_config(), {curves, threads});
    const auto table = mvmag::build_scan_table(series, manifest.carm_horizon);

    if (table.normalization.degenerate)
        std::cerr << "warning: CARM(E') has no positive entries; normalized column left unscaled\n";

    Sink sink(manifest.output_path);
    if (manifest.output_format == "json")
        sink.stream() << mvmag::scan_json(manifest, table, curves ? &series : nullptr, &grid).dump(2) << '\n';
    else
        mvmag::write_scan_csv(sink.stream(), table);

    if (curves) {
        std::ofstream out(manifest.curves_path, std::ios::binary);
        if (!out) throw mvmag::InvalidArgument("cannot open curves file '" + manifest.curves_path + "'");
        mvmag::write_curves_csv(out, series, grid);
    }
    return 0;
}

int cmd_selftest(std::uint64_t seed, double kkt_tolerance) {
    mvmag::SolverConfig cfg;
    cfg.kkt_tolerance = kkt_tolerance;
    const auto report = mvmag::run_selftest(cfg, seed);
    mvmag::print_report(std::cout, report);
    return report.all_passed() ? 0 : 1;
}

void add_run_options(CLI::App* cmd, RunManifest& m) {
    cmd->add_option("--input", m.input_path, "Price table CSV (date,<asset>...)")->required();
    cmd->add_option("--window", m.window_months, "Window length in monthly return rows")->capture_default_str();
    cmd->add_option("--lambda-points", m.lambda_points, "Uniform lambda grid size")->capture_default_str();
    cmd->add_option("--seed", m.seed, "Solver RNG seed")->capture_default_str();
    cmd->add_option("--restarts", m.restarts, "Random sign-pattern restarts")->capture_default_str();
    cmd->add_option("--format", m.output_format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--output", m.output_path, "Output path (default stdout)");
    cmd->add_flag("--exact", m.exact, "Enumerate all sign patterns instead of local search");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean-variance ground-state magnetization and market-state indicators"};
    app.require_subcommand(1);

    RunManifest frontier_manifest;
    auto* frontier = app.add_subcommand("frontier", "Lambda sweep for the window ending at the latest date");
    add_run_options(frontier, frontier_manifest);

    RunManifest scan_manifest;
    unsigned threads = 1;
    auto* scan = app.add_subcommand("scan", "Rolling scan of M, E, E' and their CARM");
    add_run_options(scan, scan_manifest);
    scan->add_option("--carm-n", scan_manifest.carm_horizon, "CARM horizon in months")->capture_default_str();
    scan->add_option("--curves", scan_manifest.curves_path, "Write the date x lambda magnetization grid here");
    scan->add_option("--threads", threads, "Worker threads over windows")->capture_default_str();

    std::uint64_t selftest_seed = 7;
    double selftest_kkt = mvmag::SolverConfig{}.kkt_tolerance;
    auto* selftest = app.add_subcommand("selftest", "Run oracle-equivalence and property checks");
    selftest->add_option("--seed", selftest_seed, "Instance generator seed")->capture_default_str();
    selftest->add_option("--kkt-tolerance", selftest_kkt, "Solver KKT tolerance under test")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*frontier) return cmd_frontier(frontier_manifest);
        if (*scan) return cmd_scan(scan_manifest, threads);
        if (*selftest) return cmd_selftest(selftest_seed, selftest_kkt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
