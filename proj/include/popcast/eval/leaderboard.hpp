#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "popcast/core/series.hpp"

namespace popcast::eval {

/// Denormalized test-horizon forecast for one (series, model) cell.
struct ForecastResult {
    SeriesKey key;
    std::string model_name;
    std::vector<int> years;
    std::vector<double> predicted;  // persons
    std::vector<double> actual;     // persons

    /// Throws std::invalid_argument unless all three lists have equal length and are finite.
    void validate() const;
};

class LeaderboardError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// MSE (persons^2) per (key, model). Rectangular: every key has every model.
class Leaderboard {
public:
    Leaderboard(std::vector<std::string> models, std::map<std::pair<SeriesKey, std::string>, double> entries);

    [[nodiscard]] const std::vector<std::string>& models() const noexcept { return models_; }
    [[nodiscard]] const std::vector<SeriesKey>& keys() const noexcept { return keys_; }
    [[nodiscard]] double at(const SeriesKey& key, const std::string& model) const;
    /// Registration index of the row's lowest MSE; ties go to the earlier model.
    [[nodiscard]] std::size_t row_winner(const SeriesKey& key) const;

private:
    std::vector<std::string> models_;
    std::vector<SeriesKey> keys_;
    std::map<std::pair<SeriesKey, std::string>, double> entries_;
};

/// Throws LeaderboardError naming a missing or duplicate (key, model) cell,
/// or a result for an unregistered model.
Leaderboard build_leaderboard(const std::vector<ForecastResult>& results,
                              const std::vector<std::string>& models);

/// Same, from precomputed MSE cells (e.g. published tables).
Leaderboard leaderboard_from_mse(const std::vector<std::pair<std::pair<SeriesKey, std::string>, double>>& cells,
                                 const std::vector<std::string>& models);

struct WinRate {
    int wins = 0;
    int total = 0;
    double fraction = 0.0;
};

/// Rows where `model` holds the lowest MSE. Throws LeaderboardError for an
/// unregistered model.
WinRate win_rate(const Leaderboard& board, const std::string& model);

/// Header `state,race,<models...>`, one row per key.
std::string leaderboard_csv(const Leaderboard& board);

}  // namespace popcast::eval
