#include "popcast/core/series.hpp"

#include <cmath>

namespace popcast {

namespace {

constexpr std::array<std::string_view, 6> kStateCodes = {"AL", "CA", "HI", "NY", "TX", "WY"};
constexpr std::array<std::string_view, 5> kRaceCodes = {"White", "Black", "AmericanIndian",
                                                        "Asian", "Hawaiian"};

}  // namespace

std::string_view to_string(State s) { return kStateCodes[static_cast<std::size_t>(s)]; }
std::string_view to_string(Race r) { return kRaceCodes[static_cast<std::size_t>(r)]; }

std::optional<State> parse_state(std::string_view code) {
    for (std::size_t i = 0; i < kStateCodes.size(); ++i) {
        if (kStateCodes[i] == code) return kAllStates[i];
    }
    return std::nullopt;
}

std::optional<Race> parse_race(std::string_view code) {
    for (std::size_t i = 0; i < kRaceCodes.size(); ++i) {
        if (kRaceCodes[i] == code) return kAllRaces[i];
    }
    return std::nullopt;
}

std::string SeriesKey::label() const {
    return std::string(to_string(state)) + "/" + std::string(to_string(race));
}

std::string SeriesKey::file_stem() const {
    return std::string(to_string(state)) + "_" + std::string(to_string(race));
}

std::vector<SeriesKey> all_series_keys() {
    std::vector<SeriesKey> keys;
    keys.reserve(kAllStates.size() * kAllRaces.size());
    for (State s : kAllStates) {
        for (Race r : kAllRaces) keys.push_back({s, r});
    }
    return keys;
}

std::optional<SeriesKey> parse_series_key(std::string_view label) {
    const auto slash = label.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    auto state = parse_state(label.substr(0, slash));
    auto race = parse_race(label.substr(slash + 1));
    if (!state || !race) return std::nullopt;
    return SeriesKey{*state, *race};
}

std::vector<int> AnnualSeries::years() const {
    std::vector<int> out(values_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = year_at(i);
    return out;
}

AnnualSeries make_series(SeriesKey key, int start_year, std::vector<double> values) {
    if (values.empty()) {
        throw SeriesError("empty series for " + key.label());
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw SeriesError("non-finite value at index " + std::to_string(i) + " in " +
                                  key.label(),
                              i);
        }
        if (values[i] < 0.0) {
            throw SeriesError("negative value at index " + std::to_string(i) + " in " +
                                  key.label(),
                              i);
        }
    }
    return AnnualSeries(key, start_year, std::move(values));
}

void SplitSpec::validate() const {
    if (test_start_year != train_end_year + 1) {
        throw std::invalid_argument("split: test_start_year must equal train_end_year + 1");
    }
    if (test_end_year < test_start_year) {
        throw std::invalid_argument("split: test_end_year precedes test_start_year");
    }
}

TrainTestSplit temporal_split(const AnnualSeries& series, const SplitSpec& spec) {
    spec.validate();
    std::vector<double> train;
    std::vector<double> test;
    std::size_t dropped = 0;
    const auto values = series.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const int year = series.year_at(i);
        if (year <= spec.train_end_year) {
            train.push_back(values[i]);
        } else if (year <= spec.test_end_year) {
            test.push_back(values[i]);
        } else {
            ++dropped;
        }
    }
    if (train.empty()) {
        throw SeriesError(series.key().label() + ": no training points on or before " +
                          std::to_string(spec.train_end_year));
    }
    if (test.empty()) {
        throw SeriesError(series.key().label() + ": no test points in " +
                          std::to_string(spec.test_start_year) + "-" +
                          std::to_string(spec.test_end_year));
    }
    const int test_start = std::max(series.start_year(), spec.test_start_year);
    return {make_series(series.key(), series.start_year(), std::move(train)),
            make_series(series.key(), test_start, std::move(test)), dropped};
}

}  // namespace popcast
