#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "popcast/forecast/config.hpp"
#include "popcast/forecast/forecaster.hpp"
#include "popcast/numerics/graph.hpp"

namespace popcast::forecast {

/// A context cut into fixed-width patches, oldest first. Short contexts are
/// left-padded with zeros; `mask` is 1 for observed positions and 0 for padding.
struct Patches {
    numerics::Tensor values;  // count x width
    numerics::Tensor mask;    // count x width

    [[nodiscard]] std::size_t count() const { return values.rows(); }
    [[nodiscard]] std::size_t width() const { return values.cols(); }
    /// True when patch `i` holds at least one observed position.
    [[nodiscard]] bool patch_valid(std::size_t i) const;
};

Patches patchify(std::span<const double> context, std::size_t input_patch);

/// Adds `count` fully padded patches in front (they must not change the output).
Patches prepend_padding(const Patches& patches, std::size_t count);

/// (context, continuation) pair; the continuation may be shorter than the horizon
/// near the end of a series.
struct TrainingExample {
    std::vector<double> context;
    std::vector<double> target;
};

/// Every split point t in 1..n-1 of every series: the up-to-context_length
/// values before t and the up-to-horizon values from t.
std::vector<TrainingExample> make_training_examples(std::span<const std::vector<double>> series_set,
                                                    const PatchDecoderConfig& config);

/// Decoder-only transformer over patch tokens: affine patch embedding, learned
/// positions counted from the first observed patch, pre-norm causal multi-head
/// attention and ReLU feed-forward blocks, and an affine head that reads the
/// last token and emits output_patch values at once.
///
/// fit/predict work in last-value-relative units: the context is shifted so
/// its last observation is 0 and the head predicts offsets from it.
class PatchDecoder {
public:
    PatchDecoder(PatchDecoderConfig config, std::uint64_t seed);

    [[nodiscard]] const PatchDecoderConfig& config() const noexcept { return config_; }

    /// Raw network output, shape (1 x output_patch). Throws if no position is
    /// observed or more observed patches arrive than positions exist.
    numerics::Graph::Var forward(numerics::Graph& g, const Patches& patches) {
        return forward_impl(*this, g, patches);
    }
    numerics::Graph::Var forward(numerics::Graph& g, const Patches& patches) const {
        return forward_impl(*this, g, patches);
    }
    [[nodiscard]] std::vector<double> forward_values(const Patches& patches) const;

    /// MSE of one example's anchored forecast against its target.
    numerics::Graph::Var example_loss(numerics::Graph& g, const TrainingExample& example);
    std::vector<numerics::Parameter*> parameters();

    /// Mini-batch Adam over make_training_examples(series_set). Throws
    /// std::invalid_argument for an empty training set and DivergenceError on a
    /// non-finite loss.
    void fit(std::span<const std::vector<double>> series_set);
    /// First `horizon` values after the last context_length points of `context`.
    [[nodiscard]] std::vector<double> predict(std::span<const double> context, std::size_t horizon) const;

    [[nodiscard]] double training_mse() const { return training_mse_; }
    [[nodiscard]] const std::vector<double>& loss_history() const { return loss_history_; }

private:
    template <typename Self>
    static numerics::Graph::Var forward_impl(Self& self, numerics::Graph& g, const Patches& patches);
    double evaluate_mse(const std::vector<TrainingExample>& examples) const;

    struct Block {
        numerics::Parameter norm1_gain, norm1_bias;
        numerics::Parameter query_weight, query_bias;
        numerics::Parameter key_weight, key_bias;
        numerics::Parameter value_weight, value_bias;
        numerics::Parameter proj_weight, proj_bias;
        numerics::Parameter norm2_gain, norm2_bias;
        numerics::Parameter ff1_weight, ff1_bias;
        numerics::Parameter ff2_weight, ff2_bias;
    };

    PatchDecoderConfig config_;
    std::uint64_t seed_;
    numerics::Parameter embed_weight_, embed_bias_;
    numerics::Parameter positions_;
    std::vector<Block> blocks_;
    numerics::Parameter final_gain_, final_bias_;
    numerics::Parameter head_weight_, head_bias_;
    double training_mse_ = 0.0;
    std::vector<double> loss_history_;
};

/// Forecaster adapter. Either trains a private decoder on the one series it is
/// fit on, or wraps a decoder already trained on a group of series and only
/// records the context.
class PatchDecoderForecaster final : public Forecaster {
public:
    PatchDecoderForecaster(PatchDecoderConfig config, std::uint64_t seed);
    explicit PatchDecoderForecaster(std::shared_ptr<const PatchDecoder> trained);

    [[nodiscard]] std::string_view name() const override { return "patchtf"; }
    void fit(const TrainingSeries& train) override;
    [[nodiscard]] std::vector<double> predict(std::size_t horizon) const override;

private:
    PatchDecoderConfig config_;
    std::uint64_t seed_ = 0;
    std::shared_ptr<const PatchDecoder> model_;
    bool owns_training_ = true;
    std::vector<double> context_;
};

}  // namespace popcast::forecast
