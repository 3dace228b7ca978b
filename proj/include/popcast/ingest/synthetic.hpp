#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "popcast/core/series.hpp"

namespace popcast::ingest {

struct FixtureOptions {
    std::uint64_t seed = 1;
    /// Leave this key's FRED file out.
    std::optional<SeriesKey> omit_key;
    /// Drop one FRED year from one key's file, creating a gap.
    std::optional<std::pair<SeriesKey, int>> gap;
};

/// Raw input files of a synthetic dataset: FRED files plus manifest keyed by
/// file name, and the census table.
struct Fixture {
    std::map<std::string, std::string> fred_files;
    std::string census;
};

/// Smooth growth curves per key with noise and occasional trend breaks. FRED
/// files cover 1990-2019 (Hawaiian files include 1990s rows, some set to the
/// "." sentinel, for the deletion rule to remove); units alternate between
/// thousands and persons; census rows cover 2020-2022.
Fixture make_fixture(const FixtureOptions& options = {});

/// Writes `<dir>/fred/*.csv` (with manifest.csv) and `<dir>/census.csv`.
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

}  // namespace popcast::ingest
