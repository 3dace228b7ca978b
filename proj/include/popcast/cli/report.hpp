#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "popcast/cli/results.hpp"
#include "popcast/eval/leaderboard.hpp"

namespace popcast::cli {

struct OmittedRow {
    SeriesKey key;
    std::string reason;
};

/// Leaderboard over the series whose cells all succeeded, plus the rows left out.
struct ReportSummary {
    std::vector<std::string> models;
    /// Empty when no series has a complete row.
    std::optional<eval::Leaderboard> board;
    std::vector<OmittedRow> omitted;
};

/// Throws ResultsError for cells of unregistered models or repeated cells.
ReportSummary summarize_results(const RunResults& results);

/// Rows with per-model MSE and winner, per-model win rates, and omitted rows.
std::string leaderboard_json(const ReportSummary& summary);

/// Human-readable win rates and omissions, one line each.
std::string summary_text(const ReportSummary& summary);

/// One chart per series with at least one successful cell, keyed by file stem
/// (e.g. "NY_White"): the actual test values and every successful model.
std::vector<std::pair<std::string, std::string>> forecast_charts(const RunResults& results);

}  // namespace popcast::cli
