#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "popcast/cli/run_config.hpp"

namespace popcast::cli {

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

struct IngestOptions {
    std::filesystem::path fred_dir;
    std::filesystem::path census_file;
    std::filesystem::path out_dir;
};

struct ReportOptions {
    std::filesystem::path results;
    std::filesystem::path out_dir;
    /// "csv", "json" or "both".
    std::string format = "both";
};

/// Writes `<out_dir>/dataset.json` and prints per-series point counts and warnings.
int cmd_ingest(const IngestOptions& options, std::ostream& out, std::ostream& err);

/// Writes `<out_dir>/results.json`. Returns kExitError only when every cell failed.
int cmd_run(const RunConfig& config, const std::filesystem::path& out_dir, unsigned threads,
            std::ostream& out, std::ostream& err);

/// Writes leaderboard.csv and/or leaderboard.json plus plots/<STATE>_<RACE>.svg.
int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

/// `popcast <ingest|run|report> [flags]`, with --config, --seed and --out
/// accepted before or after the command.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace popcast::cli
