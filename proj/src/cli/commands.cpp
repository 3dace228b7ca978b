#include "popcast/cli/commands.hpp"

#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "popcast/cli/report.hpp"
#include "popcast/cli/results.hpp"
#include "popcast/cli/runner.hpp"
#include "popcast/ingest/dataset.hpp"

namespace popcast::cli {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
    file << text;
    file.close();
    if (!file) throw std::runtime_error("error while writing " + path.string());
}

void make_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

int cmd_ingest(const IngestOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const auto dataset = ingest::build_dataset(options.fred_dir, options.census_file);
        make_dir(options.out_dir);
        const auto path = options.out_dir / "dataset.json";
        write_file(path, ingest::serialize_dataset(dataset));
        for (const auto& [key, series] : dataset.series) {
            out << key.label() << ": " << series.size() << " points (" << series.start_year() << "-"
                << series.end_year() << ")\n";
        }
        for (const auto& warning : dataset.warnings) out << "warning: " << warning << "\n";
        out << "wrote " << dataset.series.size() << " series to " << path.string() << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "ingest failed: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_run(const RunConfig& config, const std::filesystem::path& out_dir, unsigned threads,
            std::ostream& out, std::ostream& err) {
    try {
        config.validate();
        const auto dataset = ingest::read_dataset_file(config.dataset);
        make_dir(out_dir);
        const auto results = execute_run(config, dataset, threads);
        const auto path = out_dir / "results.json";
        write_file(path, serialize_results(results));
        std::size_t failed = 0;
        for (const auto& cell : results.cells) {
            if (cell.ok) continue;
            ++failed;
            err << "cell " << cell.key.label() << " " << cell.model << " failed: " << cell.error << "\n";
        }
        out << "wrote " << results.cells.size() << " cells (" << results.cells.size() - failed << " ok, "
            << failed << " failed) to " << path.string() << "\n";
        if (!results.cells.empty() && failed == results.cells.size()) {
            err << "run failed: every cell failed\n";
            return kExitError;
        }
        return results.cells.empty() ? kExitError : kExitOk;
    } catch (const std::exception& e) {
        err << "run failed: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const auto results = parse_results(ingest::read_text_file(options.results));
        const auto summary = summarize_results(results);
        if (!summary.board) throw std::runtime_error("no series has a result for every model");
        make_dir(options.out_dir);
        if (options.format == "csv" || options.format == "both") {
            write_file(options.out_dir / "leaderboard.csv", eval::leaderboard_csv(*summary.board));
        }
        if (options.format == "json" || options.format == "both") {
            write_file(options.out_dir / "leaderboard.json", leaderboard_json(summary));
        }
        const auto charts = forecast_charts(results);
        make_dir(options.out_dir / "plots");
        for (const auto& [stem, svg] : charts) write_file(options.out_dir / "plots" / (stem + ".svg"), svg);
        out << summary_text(summary);
        out << "wrote " << charts.size() << " charts to " << (options.out_dir / "plots").string() << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "report failed: " << e.what() << "\n";
        return kExitError;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Annual population forecasting experiments: ingest data, run models, report results."};
    app.name("popcast");
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    app.add_option("--config", config_path, "Flat config file or a previous results.json (run only)");
    auto* seed_opt = app.add_option("--seed", seed, "Global seed (unsigned 64-bit)");
    app.add_option("--out", out_dir, "Output directory")->required();

    IngestOptions ingest_options;
    auto* ingest_cmd = app.add_subcommand("ingest", "Merge FRED and census files into dataset.json");
    ingest_cmd->add_option("--fred-dir", ingest_options.fred_dir, "Directory with manifest.csv and FRED files")
        ->required();
    ingest_cmd->add_option("--census-file", ingest_options.census_file, "Census CSV for 2020-2022")->required();

    std::string dataset;
    std::string models;
    bool validation = false;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::string> settings;
    auto* run_cmd = app.add_subcommand("run", "Fit every model on every series and write results.json");
    auto* dataset_opt = run_cmd->add_option("--dataset", dataset, "dataset.json written by ingest");
    auto* models_opt = run_cmd->add_option("--models", models, "Comma-separated subset of lr,arima,rnn,patchtf");
    run_cmd->add_flag("--validation", validation, "Train through 2013 and score 2014-2016");
    run_cmd->add_option("--threads", threads, "Worker threads (output does not depend on it)")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--set", settings, "Override a config value, e.g. --set rnn.epochs=10");

    ReportOptions report_options;
    auto* report_cmd = app.add_subcommand("report", "Leaderboard, win rates and charts from results.json");
    report_cmd->add_option("--results", report_options.results, "results.json written by run")->required();
    report_cmd->add_option("--format", report_options.format, "Leaderboard formats")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    if (*ingest_cmd) {
        ingest_options.out_dir = out_dir;
        return cmd_ingest(ingest_options, out, err);
    }
    if (*report_cmd) {
        report_options.out_dir = out_dir;
        return cmd_report(report_options, out, err);
    }

    RunConfig config;
    if (!config_path.empty()) {
        try {
            for (const auto& [key, value] : load_config_file(config_path)) apply_setting(config, key, value);
        } catch (const std::exception& e) {
            err << "config " << config_path << ": " << e.what() << "\n";
            return kExitError;
        }
    }
    try {
        if (*dataset_opt) config.dataset = dataset;
        if (*models_opt) config.models = parse_model_list(models);
        if (*seed_opt) config.seed = seed;
        if (validation) config.split = SplitSpec::validation();
        for (const auto& s : settings) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
            apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
        }
        if (config.dataset.empty()) throw ConfigError("no dataset: pass --dataset or set run.dataset");
        config.validate();
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return kExitUsage;
    }
    return cmd_run(config, out_dir, threads, out, err);
}

}  // namespace popcast::cli
