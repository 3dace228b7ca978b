#include "popcast/eval/leaderboard.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "popcast/core/json_writer.hpp"
#include "popcast/eval/metrics.hpp"

namespace popcast::eval {

namespace {

std::string cell_name(const SeriesKey& key, const std::string& model) {
    return "(" + key.label() + ", " + model + ")";
}

}  // namespace

void ForecastResult::validate() const {
    if (predicted.size() != years.size() || actual.size() != years.size()) {
        throw std::invalid_argument("forecast result " + cell_name(key, model_name) +
                                    ": years/predicted/actual lengths differ");
    }
    for (std::size_t i = 0; i < years.size(); ++i) {
        if (!std::isfinite(predicted[i]) || !std::isfinite(actual[i])) {
            throw std::invalid_argument("forecast result " + cell_name(key, model_name) +
                                        ": non-finite value for " + std::to_string(years[i]));
        }
    }
}

Leaderboard::Leaderboard(std::vector<std::string> models,
                         std::map<std::pair<SeriesKey, std::string>, double> entries)
    : models_(std::move(models)), entries_(std::move(entries)) {
    std::set<std::string> unique(models_.begin(), models_.end());
    if (unique.size() != models_.size()) throw LeaderboardError("leaderboard: duplicate model name");
    std::set<SeriesKey> keys;
    for (const auto& [cell, value] : entries_) {
        if (!unique.contains(cell.second)) {
            throw LeaderboardError("leaderboard: cell " + cell_name(cell.first, cell.second) +
                                   " belongs to an unregistered model");
        }
        keys.insert(cell.first);
    }
    keys_.assign(keys.begin(), keys.end());
    for (const auto& key : keys_) {
        for (const auto& model : models_) {
            if (!entries_.contains({key, model})) {
                throw LeaderboardError("leaderboard: missing cell " + cell_name(key, model));
            }
        }
    }
}

double Leaderboard::at(const SeriesKey& key, const std::string& model) const {
    const auto it = entries_.find({key, model});
    if (it == entries_.end()) throw LeaderboardError("leaderboard: no cell " + cell_name(key, model));
    return it->second;
}

std::size_t Leaderboard::row_winner(const SeriesKey& key) const {
    std::size_t best = 0;
    for (std::size_t m = 1; m < models_.size(); ++m) {
        if (at(key, models_[m]) < at(key, models_[best])) best = m;
    }
    return best;
}

Leaderboard build_leaderboard(const std::vector<ForecastResult>& results,
                              const std::vector<std::string>& models) {
    std::vector<std::pair<std::pair<SeriesKey, std::string>, double>> cells;
    cells.reserve(results.size());
    for (const auto& r : results) {
        r.validate();
        cells.push_back({{r.key, r.model_name}, mse(r.actual, r.predicted)});
    }
    return leaderboard_from_mse(cells, models);
}

Leaderboard leaderboard_from_mse(const std::vector<std::pair<std::pair<SeriesKey, std::string>, double>>& cells,
                                 const std::vector<std::string>& models) {
    std::map<std::pair<SeriesKey, std::string>, double> entries;
    for (const auto& [cell, value] : cells) {
        if (!entries.emplace(cell, value).second) {
            throw LeaderboardError("leaderboard: duplicate cell " + cell_name(cell.first, cell.second));
        }
    }
    return Leaderboard(models, std::move(entries));
}

WinRate win_rate(const Leaderboard& board, const std::string& model) {
    const auto& models = board.models();
    const auto it = std::find(models.begin(), models.end(), model);
    if (it == models.end()) throw LeaderboardError("win_rate: unregistered model '" + model + "'");
    const auto index = static_cast<std::size_t>(it - models.begin());
    WinRate out;
    out.total = static_cast<int>(board.keys().size());
    for (const auto& key : board.keys()) {
        if (board.row_winner(key) == index) ++out.wins;
    }
    out.fraction = out.total == 0 ? 0.0 : static_cast<double>(out.wins) / out.total;
    return out;
}

std::string leaderboard_csv(const Leaderboard& board) {
    std::string out = "state,race";
    for (const auto& m : board.models()) out += "," + m;
    out += "\n";
    for (const auto& key : board.keys()) {
        out += std::string(to_string(key.state)) + "," + std::string(to_string(key.race));
        for (const auto& m : board.models()) out += "," + format_decimal(board.at(key, m));
        out += "\n";
    }
    return out;
}

}  // namespace popcast::eval
