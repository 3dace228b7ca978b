#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "popcast/core/series.hpp"
#include "popcast/forecast/config.hpp"

namespace popcast::cli {

/// Registration order; also the order of leaderboard columns and chart colors.
inline const std::vector<std::string> kModelNames = {"lr", "arima", "rnn", "patchtf"};

/// Invalid configuration text or value. The message names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything that determines the contents of a results file.
struct RunConfig {
    std::string dataset;
    std::vector<std::string> models = kModelNames;
    SplitSpec split;
    std::uint64_t seed = 0;
    forecast::ArimaConfig arima;
    forecast::RecurrentConfig rnn;
    forecast::PatchDecoderConfig patchtf;

    /// Throws ConfigError.
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

/// `section.key` -> value text, sorted by key.
using FlatConfig = std::map<std::string, std::string>;

/// Every key with its current value, defaults included.
FlatConfig to_flat(const RunConfig& config);

/// Sets one `section.key`. Throws ConfigError for unknown keys or unparsable values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Applies every entry on top of `base`, then validates.
RunConfig from_flat(const FlatConfig& flat, RunConfig base = {});

/// `section.key = value` lines; blank lines and `#` comments are ignored.
FlatConfig parse_flat_config(std::string_view text);
std::string serialize_flat_config(const FlatConfig& flat);

/// A flat config file, or a results file whose embedded config is used.
FlatConfig load_config_file(const std::filesystem::path& path);

/// "lr,arima" -> {"lr", "arima"}. Throws ConfigError on unknown or repeated names.
std::vector<std::string> parse_model_list(std::string_view text);

}  // namespace popcast::cli
