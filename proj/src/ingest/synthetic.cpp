#include "popcast/ingest/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "popcast/ingest/records.hpp"
#include "popcast/numerics/random.hpp"

namespace popcast::ingest {

namespace {

// Rough 1990 magnitudes (persons) by race, scaled per state.
constexpr double kRaceBase[] = {8.0e6, 1.5e6, 6.0e4, 4.0e5, 1.0e4};
constexpr double kStateScale[] = {0.35, 2.2, 0.12, 1.3, 1.6, 0.06};

}  // namespace

Fixture make_fixture(const FixtureOptions& options) {
    numerics::Rng rng(options.seed);
    Fixture fixture;
    std::string manifest = "FILE,UNIT\n";
    fixture.census = "YEAR,STATE,RACE,POPULATION\n";
    std::size_t file_index = 0;
    for (const SeriesKey key : all_series_keys()) {
        const double base = kRaceBase[static_cast<int>(key.race)] * kStateScale[static_cast<int>(key.state)];
        const double growth = rng.uniform(-0.004, 0.03);
        const double wiggle = rng.uniform(0.0, 0.01);
        const int break_year = 2005 + static_cast<int>(rng.below(14));
        const double break_slope = rng.uniform(-0.02, 0.01);
        std::map<int, double> population;
        for (int year = kFredFirstYear; year <= kCensusLastYear; ++year) {
            const double t = year - kFredFirstYear;
            double log_level = std::log(base) + growth * t + wiggle * std::sin(0.7 * t);
            if (year > break_year) log_level += break_slope * (year - break_year);
            log_level += 0.002 * rng.normal();
            population[year] = std::round(std::exp(log_level));
        }

        const bool thousands = file_index++ % 3 != 2;
        const std::string file = key.file_stem() + ".csv";
        manifest += file + (thousands ? ",thousands\n" : ",persons\n");
        if (options.omit_key && *options.omit_key == key) continue;

        std::string csv = "DATE,VALUE\n";
        for (int year = kFredFirstYear; year <= kFredLastYear; ++year) {
            if (options.gap && options.gap->first == key && options.gap->second == year) continue;
            char line[64];
            if (key.race == Race::Hawaiian && year < 1995) {
                std::snprintf(line, sizeof(line), "%d-01-01,.\n", year);
            } else if (thousands) {
                std::snprintf(line, sizeof(line), "%d-01-01,%.3f\n", year, population[year] / 1000.0);
            } else {
                std::snprintf(line, sizeof(line), "%d-01-01,%.0f\n", year, population[year]);
            }
            csv += line;
        }
        fixture.fred_files[file] = std::move(csv);
        for (int year = kCensusFirstYear; year <= kCensusLastYear; ++year) {
            char line[96];
            std::snprintf(line, sizeof(line), "%d,%s,%s,%.0f\n", year,
                          std::string(to_string(key.state)).c_str(),
                          std::string(to_string(key.race)).c_str(), population[year]);
            fixture.census += line;
        }
    }
    fixture.fred_files["manifest.csv"] = std::move(manifest);
    return fixture;
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& dir) {
    const auto fred = dir / "fred";
    std::filesystem::create_directories(fred);
    auto write = [](const std::filesystem::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out) throw std::runtime_error("cannot write " + path.string());
    };
    for (const auto& [name, text] : fixture.fred_files) write(fred / name, text);
    write(dir / "census.csv", fixture.census);
}

}  // namespace popcast::ingest
