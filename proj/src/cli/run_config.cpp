#include "popcast/cli/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>

#include <json.hpp>

#include "popcast/core/json_writer.hpp"
#include "popcast/ingest/dataset.hpp"

namespace popcast::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ConfigError(std::string(key) + ": cannot parse '" + std::string(text) + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) throw ConfigError(std::string(key) + ": value must be finite");
    }
    return v;
}

struct Field {
    std::string_view key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view)> set;
};

template <typename Section, typename T>
Field field(std::string_view key, Section RunConfig::*section, T Section::*member) {
    return {key,
            [=](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>) {
                    return format_decimal(c.*section.*member);
                } else {
                    return std::to_string(c.*section.*member);
                }
            },
            [=](RunConfig& c, std::string_view text) { c.*section.*member = parse_number<T>(key, text); }};
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
    return out;
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        using forecast::ArimaConfig;
        using forecast::PatchDecoderConfig;
        using forecast::RecurrentConfig;
        std::vector<Field> t;
        t.push_back({"run.dataset", [](const RunConfig& c) { return c.dataset; },
                     [](RunConfig& c, std::string_view v) { c.dataset = std::string(v); }});
        t.push_back({"run.models", [](const RunConfig& c) { return join(c.models); },
                     [](RunConfig& c, std::string_view v) { c.models = parse_model_list(v); }});
        t.push_back({"run.seed", [](const RunConfig& c) { return std::to_string(c.seed); },
                     [](RunConfig& c, std::string_view v) { c.seed = parse_number<std::uint64_t>("run.seed", v); }});
        t.push_back(field("split.train_end_year", &RunConfig::split, &SplitSpec::train_end_year));
        t.push_back(field("split.test_start_year", &RunConfig::split, &SplitSpec::test_start_year));
        t.push_back(field("split.test_end_year", &RunConfig::split, &SplitSpec::test_end_year));
        t.push_back(field("arima.max_p", &RunConfig::arima, &ArimaConfig::max_p));
        t.push_back(field("arima.max_d", &RunConfig::arima, &ArimaConfig::max_d));
        t.push_back(field("arima.max_q", &RunConfig::arima, &ArimaConfig::max_q));
        t.push_back(field("arima.max_iters", &RunConfig::arima, &ArimaConfig::max_iters));
        t.push_back(field("arima.tolerance", &RunConfig::arima, &ArimaConfig::tolerance));
        t.push_back(field("rnn.layers", &RunConfig::rnn, &RecurrentConfig::layers));
        t.push_back(field("rnn.hidden_units", &RunConfig::rnn, &RecurrentConfig::hidden_units));
        t.push_back(field("rnn.window", &RunConfig::rnn, &RecurrentConfig::window));
        t.push_back(field("rnn.learning_rate", &RunConfig::rnn, &RecurrentConfig::learning_rate));
        t.push_back(field("rnn.epochs", &RunConfig::rnn, &RecurrentConfig::epochs));
        t.push_back(field("patchtf.context_length", &RunConfig::patchtf, &PatchDecoderConfig::context_length));
        t.push_back(field("patchtf.horizon", &RunConfig::patchtf, &PatchDecoderConfig::horizon));
        t.push_back(field("patchtf.input_patch", &RunConfig::patchtf, &PatchDecoderConfig::input_patch));
        t.push_back(field("patchtf.output_patch", &RunConfig::patchtf, &PatchDecoderConfig::output_patch));
        t.push_back(field("patchtf.model_dim", &RunConfig::patchtf, &PatchDecoderConfig::model_dim));
        t.push_back(field("patchtf.attention_heads", &RunConfig::patchtf, &PatchDecoderConfig::attention_heads));
        t.push_back(field("patchtf.decoder_layers", &RunConfig::patchtf, &PatchDecoderConfig::decoder_layers));
        t.push_back(field("patchtf.learning_rate", &RunConfig::patchtf, &PatchDecoderConfig::learning_rate));
        t.push_back(field("patchtf.batch_size", &RunConfig::patchtf, &PatchDecoderConfig::batch_size));
        t.push_back(field("patchtf.epochs", &RunConfig::patchtf, &PatchDecoderConfig::epochs));
        return t;
    }();
    return table;
}

}  // namespace

void RunConfig::validate() const {
    if (models.empty()) throw ConfigError("run.models: at least one model is required");
    // Re-parsing the joined list checks names and duplicates.
    parse_model_list(join(models));
    try {
        split.validate();
        arima.validate();
        rnn.validate();
        patchtf.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

FlatConfig to_flat(const RunConfig& config) {
    FlatConfig flat;
    for (const auto& f : fields()) flat.emplace(std::string(f.key), f.get(config));
    return flat;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
    it->set(config, trim(value));
}

RunConfig from_flat(const FlatConfig& flat, RunConfig base) {
    for (const auto& [key, value] : flat) apply_setting(base, key, value);
    base.validate();
    return base;
}

FlatConfig parse_flat_config(std::string_view text) {
    FlatConfig flat;
    std::size_t line_number = 0;
    while (!text.empty()) {
        ++line_number;
        const auto end = text.find('\n');
        auto line = trim(text.substr(0, end));
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_number) + ": expected 'section.key = value'");
        }
        const auto key = std::string(trim(line.substr(0, eq)));
        if (key.find('.') == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_number) + ": key '" + key +
                              "' has no section");
        }
        if (!flat.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
            throw ConfigError("config line " + std::to_string(line_number) + ": duplicate key '" + key + "'");
        }
    }
    return flat;
}

std::string serialize_flat_config(const FlatConfig& flat) {
    std::string out;
    for (const auto& [key, value] : flat) out += key + " = " + value + "\n";
    return out;
}

FlatConfig load_config_file(const std::filesystem::path& path) {
    const auto text = ingest::read_text_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') return parse_flat_config(text);
    FlatConfig flat;
    try {
        const auto doc = nlohmann::json::parse(text);
        for (const auto& [key, value] : doc.at("config").items()) flat.emplace(key, value.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": no usable \"config\" object (" + e.what() + ")");
    }
    return flat;
}

std::vector<std::string> parse_model_list(std::string_view text) {
    std::vector<std::string> models;
    while (true) {
        const auto comma = text.find(',');
        const auto name = std::string(trim(text.substr(0, comma)));
        if (std::find(kModelNames.begin(), kModelNames.end(), name) == kModelNames.end()) {
            throw ConfigError("unknown model '" + name + "', expected one of lr, arima, rnn, patchtf");
        }
        if (std::find(models.begin(), models.end(), name) != models.end()) {
            throw ConfigError("model '" + name + "' listed twice");
        }
        models.push_back(name);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return models;
}

}  // namespace popcast::cli
