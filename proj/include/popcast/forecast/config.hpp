#pragma once

#include <string>
#include <variant>

namespace popcast::forecast {

struct LinearTrendConfig {
    bool operator==(const LinearTrendConfig&) const = default;
};

/// Exhaustive (p, d, q) search bounds plus simplex settings for the CSS fit.
struct ArimaConfig {
    int max_p = 3;
    int max_d = 2;
    int max_q = 3;
    int max_iters = 4000;
    double tolerance = 1e-9;

    void validate() const;
    bool operator==(const ArimaConfig&) const = default;
};

struct RecurrentConfig {
    int layers = 2;
    int hidden_units = 512;
    int window = 5;
    double learning_rate = 1e-3;
    int epochs = 72;

    void validate() const;
    bool operator==(const RecurrentConfig&) const = default;
};

struct PatchDecoderConfig {
    int context_length = 64;
    int horizon = 12;
    int input_patch = 16;
    /// Width of the output head; only the first `horizon` values are trained and used.
    int output_patch = 128;
    int model_dim = 64;
    int attention_heads = 4;
    int decoder_layers = 2;
    double learning_rate = 5e-4;
    int batch_size = 64;
    int epochs = 50;

    void validate() const;
    [[nodiscard]] int max_patches() const {
        return (context_length + input_patch - 1) / input_patch;
    }
    bool operator==(const PatchDecoderConfig&) const = default;
};

using ModelConfig = std::variant<LinearTrendConfig, ArimaConfig, RecurrentConfig, PatchDecoderConfig>;

}  // namespace popcast::forecast
