#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace popcast {

enum class State { AL, CA, HI, NY, TX, WY };
enum class Race { White, Black, AmericanIndian, Asian, Hawaiian };

inline constexpr std::array<State, 6> kAllStates = {State::AL, State::CA, State::HI,
                                                    State::NY, State::TX, State::WY};
inline constexpr std::array<Race, 5> kAllRaces = {Race::White, Race::Black, Race::AmericanIndian,
                                                  Race::Asian, Race::Hawaiian};

std::string_view to_string(State s);
std::string_view to_string(Race r);
std::optional<State> parse_state(std::string_view code);
std::optional<Race> parse_race(std::string_view code);

/// One (state, race) pair. Ordered state-major, matching kAllStates x kAllRaces.
struct SeriesKey {
    State state = State::AL;
    Race race = Race::White;

    auto operator<=>(const SeriesKey&) const = default;

    /// "NY/White"
    [[nodiscard]] std::string label() const;
    /// "NY_White", used for file names.
    [[nodiscard]] std::string file_stem() const;
};

/// All 30 keys in canonical order.
std::vector<SeriesKey> all_series_keys();
std::optional<SeriesKey> parse_series_key(std::string_view label);

/// Rejected series input. `index` is the offending position when there is one.
class SeriesError : public std::invalid_argument {
public:
    SeriesError(const std::string& what, std::optional<std::size_t> index = std::nullopt)
        : std::invalid_argument(what), index_(index) {}
    [[nodiscard]] std::optional<std::size_t> index() const noexcept { return index_; }

private:
    std::optional<std::size_t> index_;
};

/// Annual population counts (persons) for one key, one value per year without gaps.
class AnnualSeries {
public:
    [[nodiscard]] const SeriesKey& key() const noexcept { return key_; }
    [[nodiscard]] int start_year() const noexcept { return start_year_; }
    [[nodiscard]] int end_year() const noexcept {
        return start_year_ + static_cast<int>(values_.size()) - 1;
    }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] int year_at(std::size_t i) const noexcept {
        return start_year_ + static_cast<int>(i);
    }
    [[nodiscard]] std::vector<int> years() const;

    friend AnnualSeries make_series(SeriesKey key, int start_year, std::vector<double> values);

private:
    AnnualSeries(SeriesKey key, int start_year, std::vector<double> values)
        : key_(key), start_year_(start_year), values_(std::move(values)) {}

    SeriesKey key_;
    int start_year_ = 0;
    std::vector<double> values_;
};

/// Validates and builds a series. Throws SeriesError for empty input or a
/// negative / non-finite value (with its index).
AnnualSeries make_series(SeriesKey key, int start_year, std::vector<double> values);

struct SplitSpec {
    int train_end_year = 2016;
    int test_start_year = 2017;
    int test_end_year = 2022;

    void validate() const;
    /// Validation split used for hyperparameter search: train through 2013, score 2014-2016.
    static SplitSpec validation() { return {2013, 2014, 2016}; }

    bool operator==(const SplitSpec&) const = default;
};

struct TrainTestSplit {
    AnnualSeries train;
    AnnualSeries test;
    std::size_t dropped = 0;  // points after test_end_year
};

/// Chronological split. Throws SeriesError when either side would be empty.
TrainTestSplit temporal_split(const AnnualSeries& series, const SplitSpec& spec);

}  // namespace popcast
