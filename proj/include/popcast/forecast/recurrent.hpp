#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "popcast/forecast/config.hpp"
#include "popcast/forecast/forecaster.hpp"
#include "popcast/numerics/graph.hpp"

namespace popcast::forecast {

struct Window {
    std::vector<double> input;
    double target = 0.0;
};

/// Overlapping (window, next value) samples in chronological order.
/// Throws std::invalid_argument when |series| < window + 1.
std::vector<Window> make_windows(std::span<const double> series, int window);

/// Stacked LSTM cells (gate order input, forget, cell, output) with a linear
/// read-out of the top layer's last hidden state.
class LstmNetwork {
public:
    LstmNetwork(const RecurrentConfig& config, std::uint64_t seed);

    /// One prediction per sample, shape (batch x 1).
    numerics::Graph::Var forward(numerics::Graph& g, const std::vector<Window>& batch) {
        return forward_impl(*this, g, batch);
    }
    /// Inference-only pass; parameters enter the graph as constants.
    numerics::Graph::Var forward(numerics::Graph& g, const std::vector<Window>& batch) const {
        return forward_impl(*this, g, batch);
    }
    numerics::Graph::Var loss(numerics::Graph& g, const std::vector<Window>& batch);
    std::vector<numerics::Parameter*> parameters();

private:
    template <typename Self>
    static numerics::Graph::Var forward_impl(Self& self, numerics::Graph& g,
                                             const std::vector<Window>& batch);

    struct Layer {
        numerics::Parameter input_weight;      // input x 4 hidden
        numerics::Parameter recurrent_weight;  // hidden x 4 hidden
        numerics::Parameter bias;              // 4 hidden
    };
    int hidden_;
    std::vector<Layer> layers_;
    numerics::Parameter head_weight_;
    numerics::Parameter head_bias_;
};

/// One-step-ahead LSTM trained full-batch with Adam on sliding windows;
/// multi-step forecasts roll forward autoregressively.
class RecurrentForecaster final : public Forecaster {
public:
    RecurrentForecaster(RecurrentConfig config, std::uint64_t seed);

    [[nodiscard]] std::string_view name() const override { return "rnn"; }
    void fit(const TrainingSeries& train) override;
    [[nodiscard]] std::vector<double> predict(std::size_t horizon) const override;

    /// MSE over the training windows after the last update.
    [[nodiscard]] double training_mse() const { return training_mse_; }
    [[nodiscard]] const std::vector<double>& loss_history() const { return loss_history_; }

private:
    RecurrentConfig config_;
    std::uint64_t seed_;
    std::optional<LstmNetwork> network_;
    std::vector<double> tail_;
    double training_mse_ = 0.0;
    std::vector<double> loss_history_;
};

}  // namespace popcast::forecast
