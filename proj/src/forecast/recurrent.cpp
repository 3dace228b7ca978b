#include "popcast/forecast/recurrent.hpp"

#include <cmath>
#include <stdexcept>

#include "popcast/numerics/adam.hpp"
#include "popcast/numerics/random.hpp"

namespace popcast::forecast {

using numerics::Graph;
using numerics::Parameter;
using numerics::Tensor;

namespace {

Tensor uniform_tensor(std::vector<std::size_t> shape, double bound, numerics::Rng& rng) {
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.uniform(-bound, bound);
    return t;
}

}  // namespace

std::vector<Window> make_windows(std::span<const double> series, int window) {
    if (window < 1) throw std::invalid_argument("make_windows: window must be >= 1");
    const auto w = static_cast<std::size_t>(window);
    if (series.size() < w + 1) {
        throw std::invalid_argument("make_windows: " + std::to_string(series.size()) +
                                    " points are too few for window " + std::to_string(window));
    }
    std::vector<Window> out;
    out.reserve(series.size() - w);
    for (std::size_t start = 0; start + w < series.size(); ++start) {
        out.push_back({{series.begin() + static_cast<std::ptrdiff_t>(start),
                        series.begin() + static_cast<std::ptrdiff_t>(start + w)},
                       series[start + w]});
    }
    return out;
}

LstmNetwork::LstmNetwork(const RecurrentConfig& config, std::uint64_t seed)
    : hidden_(config.hidden_units) {
    config.validate();
    numerics::Rng rng(seed);
    const auto h = static_cast<std::size_t>(hidden_);
    for (int l = 0; l < config.layers; ++l) {
        const std::size_t in = l == 0 ? 1 : h;
        const double bound = 1.0 / std::sqrt(static_cast<double>(in + h));
        Parameter input_weight(uniform_tensor({in, 4 * h}, bound, rng));
        Parameter recurrent_weight(uniform_tensor({h, 4 * h}, bound, rng));
        Parameter bias(uniform_tensor({4 * h}, bound, rng));
        for (std::size_t k = h; k < 2 * h; ++k) bias.value[k] = 1.0;  // forget gate
        layers_.push_back({std::move(input_weight), std::move(recurrent_weight), std::move(bias)});
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(h));
    head_weight_ = Parameter(uniform_tensor({h, 1}, bound, rng));
    head_bias_ = Parameter(uniform_tensor({1}, bound, rng));
}

template <typename Self>
Graph::Var LstmNetwork::forward_impl(Self& self, Graph& g, const std::vector<Window>& batch) {
    if (batch.empty()) throw std::invalid_argument("lstm: empty batch");
    const std::size_t steps = batch.front().input.size();
    const std::size_t b = batch.size();
    const auto h = static_cast<std::size_t>(self.hidden_);

    std::vector<Graph::Var> sequence;
    for (std::size_t t = 0; t < steps; ++t) {
        Tensor x = Tensor::matrix(b, 1);
        for (std::size_t i = 0; i < b; ++i) x[i] = batch[i].input.at(t);
        sequence.push_back(g.constant(std::move(x)));
    }
    // The input half of every step's gate pre-activation comes from one
    // product over all steps; only the recurrent half runs step by step.
    for (auto& layer : self.layers_) {
        const auto recurrent_weight = g.parameter(layer.recurrent_weight);
        const auto projected = g.affine(g.concat_rows(sequence), g.parameter(layer.input_weight),
                                        g.parameter(layer.bias));
        Graph::Var hidden{};
        Graph::Var cell{};
        std::vector<Graph::Var> outputs;
        outputs.reserve(steps);
        for (std::size_t t = 0; t < steps; ++t) {
            auto gates = g.slice_rows(projected, t * b, (t + 1) * b);
            if (t > 0) gates = g.add(gates, g.matmul(hidden, recurrent_weight));
            const auto in_gate = g.sigmoid(g.slice_cols(gates, 0, h));
            const auto forget_gate = g.sigmoid(g.slice_cols(gates, h, 2 * h));
            const auto candidate = g.tanh(g.slice_cols(gates, 2 * h, 3 * h));
            const auto out_gate = g.sigmoid(g.slice_cols(gates, 3 * h, 4 * h));
            cell = t > 0 ? g.add(g.mul(forget_gate, cell), g.mul(in_gate, candidate))
                         : g.mul(in_gate, candidate);
            hidden = g.mul(out_gate, g.tanh(cell));
            outputs.push_back(hidden);
        }
        sequence = std::move(outputs);
    }
    return g.affine(sequence.back(), g.parameter(self.head_weight_), g.parameter(self.head_bias_));
}

template Graph::Var LstmNetwork::forward_impl(LstmNetwork&, Graph&, const std::vector<Window>&);
template Graph::Var LstmNetwork::forward_impl(const LstmNetwork&, Graph&, const std::vector<Window>&);

Graph::Var LstmNetwork::loss(Graph& g, const std::vector<Window>& batch) {
    const auto prediction = forward(g, batch);
    Tensor target = Tensor::matrix(batch.size(), 1);
    for (std::size_t i = 0; i < batch.size(); ++i) target[i] = batch[i].target;
    return g.mse(prediction, target);
}

std::vector<Parameter*> LstmNetwork::parameters() {
    std::vector<Parameter*> out;
    for (auto& layer : layers_) {
        out.push_back(&layer.input_weight);
        out.push_back(&layer.recurrent_weight);
        out.push_back(&layer.bias);
    }
    out.push_back(&head_weight_);
    out.push_back(&head_bias_);
    return out;
}

RecurrentForecaster::RecurrentForecaster(RecurrentConfig config, std::uint64_t seed)
    : config_(config), seed_(seed) {
    config_.validate();
}

void RecurrentForecaster::fit(const TrainingSeries& train) {
    const auto windows = make_windows(train.values, config_.window);
    network_.emplace(config_, seed_);
    auto params = network_->parameters();
    numerics::AdamState adam;
    loss_history_.clear();
    for (int epoch = 1; epoch <= config_.epochs; ++epoch) {
        for (auto* p : params) p->zero_grad();
        Graph g;
        const auto loss = network_->loss(g, windows);
        const double value = g.value(loss)[0];
        if (!std::isfinite(value)) throw DivergenceError("rnn: non-finite training loss", epoch);
        loss_history_.push_back(value);
        g.backward(loss);
        try {
            numerics::adam_step(params, adam, config_.learning_rate);
        } catch (const std::invalid_argument& e) {
            throw DivergenceError(std::string("rnn: ") + e.what(), epoch);
        }
    }
    Graph g;
    training_mse_ = g.value(network_->loss(g, windows))[0];
    if (!std::isfinite(training_mse_)) throw DivergenceError("rnn: non-finite training loss", config_.epochs);
    const auto w = static_cast<std::size_t>(config_.window);
    tail_.assign(train.values.end() - static_cast<std::ptrdiff_t>(w), train.values.end());
}

std::vector<double> RecurrentForecaster::predict(std::size_t horizon) const {
    if (!network_) throw std::logic_error("rnn: predict before fit");
    const LstmNetwork& network = *network_;
    std::vector<double> window = tail_;
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
        Graph g;
        const double next = g.value(network.forward(g, {Window{window, 0.0}}))[0];
        if (!std::isfinite(next)) throw std::runtime_error("rnn: non-finite forecast");
        out.push_back(next);
        window.erase(window.begin());
        window.push_back(next);
    }
    return out;
}

}  // namespace popcast::forecast
