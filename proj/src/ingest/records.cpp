#include "popcast/ingest/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>

namespace popcast::ingest {

namespace {

struct Line {
    std::size_t number;
    std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    std::vector<Line> lines;
    std::size_t number = 1;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        if (line.ends_with('\r')) line.remove_suffix(1);
        lines.push_back({number++, line});
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    // Trailing blank lines carry no data.
    while (!lines.empty() && lines.back().text.empty()) lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    while (true) {
        const auto comma = line.find(',');
        auto field = line.substr(0, comma);
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
        fields.push_back(field);
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return fields;
}

std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    if (s.empty()) return std::nullopt;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

/// Parses a plain decimal and multiplies it by 10^shift by moving the decimal
/// point in the text, so "100.5" thousands becomes exactly 100500.
std::optional<double> parse_scaled_decimal(std::string_view s, int shift) {
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    const auto dot = s.find('.');
    std::string int_part(s.substr(0, dot));
    std::string frac_part(dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1));
    if (int_part.empty() && frac_part.empty()) return std::nullopt;
    if ((!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part))) {
        return std::nullopt;
    }
    for (int i = 0; i < shift; ++i) {
        if (frac_part.empty()) {
            int_part += '0';
        } else {
            int_part += frac_part.front();
            frac_part.erase(frac_part.begin());
        }
    }
    std::string text = (negative ? "-" : "") + (int_part.empty() ? "0" : int_part);
    if (!frac_part.empty()) text += "." + frac_part;
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

/// YYYY-MM-DD, must be a real calendar date and fall on January 1.
int parse_fred_date(std::string_view s, std::size_t line) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        throw ParseError(line, "malformed date '" + std::string(s) + "', expected YYYY-MM-DD");
    }
    auto number = [&](std::size_t pos, std::size_t len) {
        const auto part = s.substr(pos, len);
        const auto v = all_digits(part) ? parse_int(part) : std::nullopt;
        if (!v) throw ParseError(line, "malformed date '" + std::string(s) + "'");
        return *v;
    };
    const int year = number(0, 4);
    const int month = number(5, 2);
    const int day = number(8, 2);
    if (month < 1 || month > 12) {
        throw ParseError(line, "bad month " + std::to_string(month) + " in date '" +
                                   std::string(s) + "'");
    }
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const int max_day = kDays[month - 1] + (month == 2 && is_leap(year) ? 1 : 0);
    if (day < 1 || day > max_day) {
        throw ParseError(line, "bad day " + std::to_string(day) + " in date '" +
                                   std::string(s) + "'");
    }
    if (month != 1 || day != 1) {
        throw ParseError(line, "expected a January 1 observation date, got '" +
                                   std::string(s) + "'");
    }
    return year;
}

void expect_header(const std::vector<Line>& lines, std::string_view header) {
    if (lines.empty()) throw ParseError(1, "missing header '" + std::string(header) + "'");
    auto fields = split_fields(lines.front().text);
    std::string joined;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) joined += ',';
        joined += fields[i];
    }
    if (joined != header) {
        throw ParseError(1, "expected header '" + std::string(header) + "', got '" +
                                std::string(lines.front().text) + "'");
    }
}

}  // namespace

std::string_view to_string(Source s) { return s == Source::FRED ? "FRED" : "CENSUS"; }

Unit parse_unit(std::string_view text) {
    if (text == "persons") return Unit::Persons;
    if (text == "thousands") return Unit::Thousands;
    throw std::invalid_argument("unknown unit '" + std::string(text) +
                                "', expected persons or thousands");
}

ParsedRecords parse_fred_csv(std::string_view text, SeriesKey key, Unit unit) {
    const auto lines = split_lines(text);
    expect_header(lines, "DATE,VALUE");
    ParsedRecords out;
    std::map<int, std::size_t> seen;
    const int shift = unit == Unit::Thousands ? 3 : 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& line = lines[i];
        const auto fields = split_fields(line.text);
        if (fields.size() != 2) {
            throw ParseError(line.number, "expected 2 fields, got " + std::to_string(fields.size()));
        }
        const int year = parse_fred_date(fields[0], line.number);
        if (auto [it, inserted] = seen.emplace(year, line.number); !inserted) {
            throw ParseError(line.number, "duplicate year " + std::to_string(year) +
                                              " (first seen on line " +
                                              std::to_string(it->second) + ")");
        }
        if (fields[1] == ".") {
            out.warnings.push_back(key.label() + ": missing FRED value for " +
                                   std::to_string(year) + " skipped");
            continue;
        }
        const auto value = parse_scaled_decimal(fields[1], shift);
        if (!value) {
            throw ParseError(line.number, "non-numeric value '" + std::string(fields[1]) + "'");
        }
        if (year < kFredFirstYear || year > kFredLastYear) {
            out.warnings.push_back(key.label() + ": FRED row for " + std::to_string(year) +
                                   " outside 1990-2019 ignored");
            continue;
        }
        out.records.push_back({year, key, *value, Source::FRED});
    }
    return out;
}

ParsedRecords parse_census_csv(std::string_view text) {
    const auto lines = split_lines(text);
    expect_header(lines, "YEAR,STATE,RACE,POPULATION");
    ParsedRecords out;
    std::map<std::pair<SeriesKey, int>, std::size_t> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& line = lines[i];
        const auto fields = split_fields(line.text);
        if (fields.size() != 4) {
            throw ParseError(line.number, "expected 4 fields, got " + std::to_string(fields.size()));
        }
        const auto year = parse_int(fields[0]);
        if (!year) throw ParseError(line.number, "malformed year '" + std::string(fields[0]) + "'");
        if (*year < kCensusFirstYear || *year > kCensusLastYear) {
            throw ParseError(line.number, "census years are 2020-2022, got " + std::to_string(*year));
        }
        const auto state = parse_state(fields[1]);
        if (!state) throw ParseError(line.number, "unknown state '" + std::string(fields[1]) + "'");
        const auto race = parse_race(fields[2]);
        if (!race) throw ParseError(line.number, "unknown race '" + std::string(fields[2]) + "'");
        if (!all_digits(fields[3])) {
            throw ParseError(line.number, "population must be a non-negative integer, got '" +
                                              std::string(fields[3]) + "'");
        }
        const auto population = parse_scaled_decimal(fields[3], 0);
        if (!population) {
            throw ParseError(line.number, "population out of range '" + std::string(fields[3]) + "'");
        }
        const SeriesKey key{*state, *race};
        if (auto [it, inserted] = seen.emplace(std::pair{key, *year}, line.number); !inserted) {
            throw ParseError(line.number, "duplicate row for " + key.label() + " " +
                                              std::to_string(*year) + " (first seen on line " +
                                              std::to_string(it->second) + ")");
        }
        out.records.push_back({*year, key, *population, Source::CENSUS});
    }
    return out;
}

std::vector<RawRecord> apply_deletion_rule(std::vector<RawRecord> records, SeriesKey key) {
    if (key.race != Race::Hawaiian) return records;
    std::erase_if(records, [](const RawRecord& r) { return r.year < kHawaiianFirstYear; });
    return records;
}

int expected_first_year(SeriesKey key) {
    return key.race == Race::Hawaiian ? kHawaiianFirstYear : kFredFirstYear;
}

MergedSeries merge_sources(const std::vector<RawRecord>& fred,
                           const std::vector<RawRecord>& census, SeriesKey key) {
    struct Point {
        double population;
        Source source;
    };
    std::map<int, Point> by_year;
    std::vector<std::string> warnings;

    auto insert_all = [&](const std::vector<RawRecord>& records, Source expected) {
        for (const auto& r : apply_deletion_rule(records, key)) {
            if (r.key != key) {
                throw MergeError(key.label() + ": record for " + r.key.label() +
                                 " passed to merge");
            }
            if (r.source != expected) {
                throw MergeError(key.label() + ": " + std::string(to_string(r.source)) +
                                 " record in the " + std::string(to_string(expected)) + " list");
            }
            auto [it, inserted] = by_year.try_emplace(r.year, Point{r.population, r.source});
            if (inserted) continue;
            if (it->second.source == r.source) {
                throw MergeError(key.label() + ": duplicate " + std::string(to_string(r.source)) +
                                 " year " + std::to_string(r.year));
            }
            // Census is the later official revision.
            if (it->second.population != r.population) {
                warnings.push_back(key.label() + ": FRED and CENSUS disagree for " +
                                   std::to_string(r.year) + ", using CENSUS");
            }
            it->second = Point{r.population, Source::CENSUS};
        }
    };
    insert_all(fred, Source::FRED);
    insert_all(census, Source::CENSUS);

    const int first = expected_first_year(key);
    const int last = kCensusLastYear;
    if (!by_year.empty()) {
        if (by_year.begin()->first < first || by_year.rbegin()->first > last) {
            const int bad = by_year.begin()->first < first ? by_year.begin()->first
                                                           : by_year.rbegin()->first;
            throw MergeError(key.label() + ": year " + std::to_string(bad) + " outside " +
                             std::to_string(first) + "-" + std::to_string(last));
        }
    }
    std::vector<double> values;
    std::vector<Source> provenance;
    for (int year = first; year <= last; ++year) {
        const auto it = by_year.find(year);
        if (it == by_year.end()) {
            throw MergeError(key.label() + ": gap at " + std::to_string(year));
        }
        values.push_back(it->second.population);
        provenance.push_back(it->second.source);
    }
    return {make_series(key, first, std::move(values)), std::move(provenance), std::move(warnings)};
}

}  // namespace popcast::ingest
