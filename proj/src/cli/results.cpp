#include "popcast/cli/results.hpp"

#include <json.hpp>

#include "popcast/core/json_writer.hpp"

namespace popcast::cli {

namespace {

constexpr std::string_view kFormat = "popcast-results/1";

}  // namespace

eval::ForecastResult CellResult::forecast() const {
    eval::ForecastResult r{key, model, years, predicted, actual};
    r.validate();
    return r;
}

std::string serialize_results(const RunResults& results) {
    JsonWriter w;
    w.begin_object();
    w.key("format").value(kFormat);
    w.key("seed").value(results.seed);
    w.key("config").begin_object();
    for (const auto& [key, value] : results.config) w.key(key).value(value);
    w.end_object();
    w.key("models").string_array(results.models);
    w.key("cells").begin_array();
    for (const auto& cell : results.cells) {
        w.begin_object();
        w.key("state").value(to_string(cell.key.state));
        w.key("race").value(to_string(cell.key.race));
        w.key("model").value(cell.model);
        w.key("status").value(cell.ok ? "ok" : "failed");
        if (cell.ok) {
            w.key("detail").value(cell.detail);
            w.key("years").int_array(cell.years);
            w.key("predicted").number_array(cell.predicted);
            w.key("actual").number_array(cell.actual);
        } else {
            w.key("error").value(cell.error);
        }
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

RunResults parse_results(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ResultsError(std::string("results: invalid JSON: ") + e.what());
    }
    RunResults out;
    std::string where = "results";
    try {
        if (!doc.is_object()) throw ResultsError("results: top level must be an object");
        if (doc.at("format").get<std::string>() != kFormat) {
            throw ResultsError("results: unsupported format '" + doc.at("format").get<std::string>() + "'");
        }
        if (!doc.at("seed").is_number_unsigned()) {
            throw ResultsError("results: seed must be a non-negative integer");
        }
        out.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto& [key, value] : doc.at("config").items()) out.config.emplace(key, value.get<std::string>());
        out.models = doc.at("models").get<std::vector<std::string>>();
        const auto& cells = doc.at("cells");
        if (!cells.is_array()) throw ResultsError("results: cells must be an array");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            where = "results: cell " + std::to_string(i);
            const auto& c = cells[i];
            CellResult cell;
            const auto state = parse_state(c.at("state").get<std::string>());
            const auto race = parse_race(c.at("race").get<std::string>());
            if (!state || !race) throw ResultsError(where + ": unknown state or race");
            cell.key = {*state, *race};
            cell.model = c.at("model").get<std::string>();
            const auto status = c.at("status").get<std::string>();
            if (status == "ok") {
                cell.ok = true;
                cell.detail = c.at("detail").get<std::string>();
                cell.years = c.at("years").get<std::vector<int>>();
                cell.predicted = c.at("predicted").get<std::vector<double>>();
                cell.actual = c.at("actual").get<std::vector<double>>();
                try {
                    (void)cell.forecast();
                } catch (const std::invalid_argument& e) {
                    throw ResultsError(where + ": " + e.what());
                }
            } else if (status == "failed") {
                cell.error = c.at("error").get<std::string>();
            } else {
                throw ResultsError(where + ": unknown status '" + status + "'");
            }
            out.cells.push_back(std::move(cell));
        }
    } catch (const json::exception& e) {
        throw ResultsError(where + ": " + e.what());
    }
    return out;
}

}  // namespace popcast::cli
