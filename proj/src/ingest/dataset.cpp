#include "popcast/ingest/dataset.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "popcast/core/json_writer.hpp"

namespace popcast::ingest {

namespace {

std::map<std::string, Unit> read_manifest(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    std::map<std::string, Unit> units;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (number == 1) {
            if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
            if (line != "FILE,UNIT") {
                throw IngestError(path.string() + ": line 1: expected header 'FILE,UNIT'");
            }
            continue;
        }
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw IngestError(path.string() + ": line " + std::to_string(number) +
                              ": expected FILE,UNIT");
        }
        try {
            units[line.substr(0, comma)] = parse_unit(line.substr(comma + 1));
        } catch (const std::invalid_argument& e) {
            throw IngestError(path.string() + ": line " + std::to_string(number) + ": " + e.what());
        }
    }
    if (number == 0) throw IngestError(path.string() + ": empty manifest");
    return units;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IngestError("error reading " + path.string());
    return buf.str();
}

Dataset build_dataset(const std::filesystem::path& fred_dir,
                      const std::filesystem::path& census_file) {
    const auto units = read_manifest(fred_dir / "manifest.csv");

    ParsedRecords census;
    try {
        census = parse_census_csv(read_text_file(census_file));
    } catch (const ParseError& e) {
        throw IngestError(census_file.string() + ": " + e.what());
    }

    std::map<SeriesKey, std::vector<RawRecord>> census_by_key;
    for (const auto& r : census.records) census_by_key[r.key].push_back(r);

    Dataset dataset;
    dataset.warnings = census.warnings;
    for (const SeriesKey key : all_series_keys()) {
        const std::string file = key.file_stem() + ".csv";
        const auto path = fred_dir / file;
        if (!std::filesystem::exists(path)) {
            throw IngestError(key.label() + ": missing FRED file " + path.string());
        }
        const auto unit = units.find(file);
        if (unit == units.end()) {
            throw IngestError(key.label() + ": " + file + " has no entry in manifest.csv");
        }
        try {
            auto fred = parse_fred_csv(read_text_file(path), key, unit->second);
            auto merged = merge_sources(fred.records, census_by_key[key], key);
            dataset.warnings.insert(dataset.warnings.end(), fred.warnings.begin(),
                                    fred.warnings.end());
            dataset.warnings.insert(dataset.warnings.end(), merged.warnings.begin(),
                                    merged.warnings.end());
            dataset.provenance.emplace(key, std::move(merged.provenance));
            dataset.series.emplace(key, std::move(merged.series));
        } catch (const ParseError& e) {
            throw IngestError(key.label() + ": " + path.string() + ": " + e.what());
        } catch (const IngestError&) {
            throw;
        } catch (const std::exception& e) {
            throw IngestError(key.label() + ": " + e.what());
        }
    }
    return dataset;
}

std::string serialize_dataset(const Dataset& dataset) {
    JsonWriter w;
    w.begin_object();
    for (const auto& [key, series] : dataset.series) {
        w.key(key.label()).begin_object();
        w.key("start_year").value(series.start_year());
        w.key("values").number_array(series.values());
        w.end_object();
    }
    w.end_object();
    return w.str();
}

Dataset parse_dataset_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IngestError(std::string("dataset JSON: ") + e.what());
    }
    if (!doc.is_object()) throw IngestError("dataset JSON: top level must be an object");
    Dataset dataset;
    for (const auto& [label, entry] : doc.items()) {
        const auto key = parse_series_key(label);
        if (!key) throw IngestError("dataset JSON: unknown series key '" + label + "'");
        try {
            const int start = entry.at("start_year").get<int>();
            auto values = entry.at("values").get<std::vector<double>>();
            dataset.series.emplace(*key, make_series(*key, start, std::move(values)));
        } catch (const nlohmann::json::exception& e) {
            throw IngestError("dataset JSON: " + label + ": " + e.what());
        } catch (const SeriesError& e) {
            throw IngestError("dataset JSON: " + label + ": " + e.what());
        }
    }
    return dataset;
}

Dataset read_dataset_file(const std::filesystem::path& path) {
    return parse_dataset_json(read_text_file(path));
}

}  // namespace popcast::ingest
