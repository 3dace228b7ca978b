#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "popcast/core/series.hpp"

namespace popcast::ingest {

enum class Source { FRED, CENSUS };
std::string_view to_string(Source s);

/// FRED observations are accepted for 1990-2019, Census estimates for 2020-2022.
inline constexpr int kFredFirstYear = 1990;
inline constexpr int kFredLastYear = 2019;
inline constexpr int kCensusFirstYear = 2020;
inline constexpr int kCensusLastYear = 2022;
/// Native Hawaiian series are kept from this year on; earlier rows are deleted.
inline constexpr int kHawaiianFirstYear = 2000;

struct RawRecord {
    int year = 0;
    SeriesKey key;
    double population = 0.0;  // persons
    Source source = Source::FRED;

    bool operator==(const RawRecord&) const = default;
};

/// Malformed input row. `line` is 1-based and counts the header.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

enum class Unit { Persons, Thousands };
Unit parse_unit(std::string_view text);

struct ParsedRecords {
    std::vector<RawRecord> records;
    std::vector<std::string> warnings;
};

/// `DATE,VALUE` table with January 1 observation dates. The "." missing-value
/// sentinel and rows outside 1990-2019 are skipped with a warning.
ParsedRecords parse_fred_csv(std::string_view text, SeriesKey key, Unit unit);

/// `YEAR,STATE,RACE,POPULATION` table of 2020-2022 integer estimates.
ParsedRecords parse_census_csv(std::string_view text);

/// Drops pre-2000 rows for Native Hawaiian keys; identity otherwise.
std::vector<RawRecord> apply_deletion_rule(std::vector<RawRecord> records, SeriesKey key);

class MergeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MergedSeries {
    AnnualSeries series;
    std::vector<Source> provenance;  // one tag per point
    std::vector<std::string> warnings;
};

/// First year a valid merged series for `key` must cover.
int expected_first_year(SeriesKey key);

/// Joins both sources on year after the deletion rule. The result must cover
/// expected_first_year(key)..2022 without gaps. Census wins on overlapping years.
MergedSeries merge_sources(const std::vector<RawRecord>& fred,
                           const std::vector<RawRecord>& census, SeriesKey key);

}  // namespace popcast::ingest
