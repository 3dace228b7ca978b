#include "popcast/cli/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "popcast/cli/svg_chart.hpp"
#include "popcast/core/json_writer.hpp"

namespace popcast::cli {

namespace {

std::map<SeriesKey, std::vector<const CellResult*>> cells_by_key(const RunResults& results) {
    std::map<SeriesKey, std::vector<const CellResult*>> rows;
    for (const auto& cell : results.cells) {
        const auto m = std::find(results.models.begin(), results.models.end(), cell.model);
        if (m == results.models.end()) {
            throw ResultsError("results: cell " + cell.key.label() + " uses unregistered model '" +
                               cell.model + "'");
        }
        auto& row = rows[cell.key];
        if (row.empty()) row.resize(results.models.size(), nullptr);
        auto& slot = row[static_cast<std::size_t>(m - results.models.begin())];
        if (slot) throw ResultsError("results: duplicate cell " + cell.key.label() + " " + cell.model);
        slot = &cell;
    }
    return rows;
}

}  // namespace

ReportSummary summarize_results(const RunResults& results) {
    ReportSummary summary;
    summary.models = results.models;
    std::vector<eval::ForecastResult> complete;
    for (const auto& [key, row] : cells_by_key(results)) {
        std::string reason;
        for (std::size_t m = 0; m < row.size(); ++m) {
            if (!row[m]) {
                reason = "no result for " + results.models[m];
            } else if (!row[m]->ok) {
                reason = results.models[m] + " failed: " + row[m]->error;
            }
            if (!reason.empty()) break;
        }
        if (!reason.empty()) {
            summary.omitted.push_back({key, reason});
            continue;
        }
        for (const auto* cell : row) complete.push_back(cell->forecast());
    }
    if (!complete.empty()) summary.board = eval::build_leaderboard(complete, results.models);
    return summary;
}

std::string leaderboard_json(const ReportSummary& summary) {
    JsonWriter w;
    w.begin_object();
    w.key("models").string_array(summary.models);
    w.key("rows").begin_array();
    if (summary.board) {
        const auto& board = *summary.board;
        for (const auto& key : board.keys()) {
            w.begin_object();
            w.key("state").value(to_string(key.state));
            w.key("race").value(to_string(key.race));
            w.key("mse").begin_object();
            for (const auto& m : board.models()) w.key(m).value(board.at(key, m));
            w.end_object();
            w.key("winner").value(board.models()[board.row_winner(key)]);
            w.end_object();
        }
    }
    w.end_array();
    w.key("win_rates").begin_array();
    if (summary.board) {
        for (const auto& m : summary.models) {
            const auto rate = eval::win_rate(*summary.board, m);
            w.begin_object();
            w.key("model").value(m);
            w.key("wins").value(rate.wins);
            w.key("total").value(rate.total);
            w.key("fraction").value(rate.fraction);
            w.end_object();
        }
    }
    w.end_array();
    w.key("omitted").begin_array();
    for (const auto& row : summary.omitted) {
        w.begin_object();
        w.key("state").value(to_string(row.key.state));
        w.key("race").value(to_string(row.key.race));
        w.key("reason").value(row.reason);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

std::string summary_text(const ReportSummary& summary) {
    std::string out;
    const std::size_t rows = summary.board ? summary.board->keys().size() : 0;
    out += "leaderboard: " + std::to_string(rows) + " rows, " + std::to_string(summary.models.size()) +
           " models, " + std::to_string(summary.omitted.size()) + " rows omitted\n";
    if (summary.board) {
        for (const auto& m : summary.models) {
            const auto rate = eval::win_rate(*summary.board, m);
            char pct[32];
            std::snprintf(pct, sizeof(pct), "%.2f%%", 100.0 * rate.fraction);
            out += "win rate " + m + ": " + std::to_string(rate.wins) + "/" + std::to_string(rate.total) +
                   " (" + pct + ")\n";
        }
    }
    for (const auto& row : summary.omitted) out += "omitted " + row.key.label() + ": " + row.reason + "\n";
    return out;
}

std::vector<std::pair<std::string, std::string>> forecast_charts(const RunResults& results) {
    std::vector<std::pair<std::string, std::string>> charts;
    for (const auto& [key, row] : cells_by_key(results)) {
        std::vector<ChartLine> lines;
        for (std::size_t m = 0; m < row.size(); ++m) {
            const auto* cell = row[m];
            if (!cell || !cell->ok) continue;
            if (lines.empty()) lines.push_back({"actual", "#000000", cell->years, cell->actual});
            const auto label = cell->detail.empty() || cell->detail == cell->model
                                   ? cell->model
                                   : cell->model + " " + cell->detail;
            lines.push_back({label, model_color(m), cell->years, cell->predicted});
        }
        if (lines.empty()) continue;
        charts.emplace_back(key.file_stem(), render_svg_chart(key.label() + ": test-period forecasts", lines));
    }
    return charts;
}

}  // namespace popcast::cli
