#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "popcast/cli/run_config.hpp"
#include "popcast/core/series.hpp"
#include "popcast/eval/leaderboard.hpp"

namespace popcast::cli {

/// One (series, model) cell of a run. Failed cells keep only the error.
struct CellResult {
    SeriesKey key;
    std::string model;
    bool ok = false;
    std::string error;
    /// Fitted-model summary, e.g. "ARIMA(1,2,0)".
    std::string detail;
    std::vector<int> years;
    std::vector<double> predicted;  // persons
    std::vector<double> actual;     // persons

    [[nodiscard]] eval::ForecastResult forecast() const;
    bool operator==(const CellResult&) const = default;
};

struct RunResults {
    std::uint64_t seed = 0;
    FlatConfig config;
    std::vector<std::string> models;
    /// Key order, then model registration order.
    std::vector<CellResult> cells;

    bool operator==(const RunResults&) const = default;
};

class ResultsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string serialize_results(const RunResults& results);
/// Throws ResultsError describing the first malformed field.
RunResults parse_results(std::string_view text);

}  // namespace popcast::cli
