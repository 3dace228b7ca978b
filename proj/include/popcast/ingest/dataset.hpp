#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "popcast/core/series.hpp"
#include "popcast/ingest/records.hpp"

namespace popcast::ingest {

struct Dataset {
    std::map<SeriesKey, AnnualSeries> series;
    /// Per-point source tags; empty for datasets loaded from JSON.
    std::map<SeriesKey, std::vector<Source>> provenance;
    std::vector<std::string> warnings;
};

/// Any failure while assembling a dataset, prefixed with the key or path involved.
class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads `<fred_dir>/manifest.csv`, one `<STATE>_<RACE>.csv` per key and the
/// census table, and returns all 30 merged series.
Dataset build_dataset(const std::filesystem::path& fred_dir,
                      const std::filesystem::path& census_file);

/// {"AL/White": {"start_year": 1990, "values": [...]}, ...} in key order.
std::string serialize_dataset(const Dataset& dataset);
Dataset parse_dataset_json(std::string_view text);

Dataset read_dataset_file(const std::filesystem::path& path);

/// Reads a whole file; throws IngestError naming the path on failure.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace popcast::ingest
