#include "popcast/forecast/patch_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "popcast/numerics/adam.hpp"
#include "popcast/numerics/random.hpp"

namespace popcast::forecast {

using numerics::Graph;
using numerics::Parameter;
using numerics::Tensor;

namespace {

Parameter uniform_param(std::vector<std::size_t> shape, double fan_in, numerics::Rng& rng) {
    const double bound = 1.0 / std::sqrt(fan_in);
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.uniform(-bound, bound);
    return Parameter(std::move(t));
}

Parameter filled_param(std::size_t n, double value) { return Parameter(Tensor({n}, value)); }

}  // namespace

bool Patches::patch_valid(std::size_t i) const {
    const std::size_t w = width();
    for (std::size_t c = 0; c < w; ++c) {
        if (mask[i * w + c] != 0.0) return true;
    }
    return false;
}

Patches patchify(std::span<const double> context, std::size_t input_patch) {
    if (input_patch == 0) throw std::invalid_argument("patchify: input_patch must be >= 1");
    if (context.empty()) throw std::invalid_argument("patchify: empty context");
    const std::size_t count = (context.size() + input_patch - 1) / input_patch;
    const std::size_t padding = count * input_patch - context.size();
    Patches out{Tensor::matrix(count, input_patch), Tensor::matrix(count, input_patch)};
    for (std::size_t i = 0; i < context.size(); ++i) {
        out.values[padding + i] = context[i];
        out.mask[padding + i] = 1.0;
    }
    return out;
}

Patches prepend_padding(const Patches& patches, std::size_t count) {
    const std::size_t w = patches.width();
    Patches out{Tensor::matrix(patches.count() + count, w), Tensor::matrix(patches.count() + count, w)};
    std::copy(patches.values.data().begin(), patches.values.data().end(),
              out.values.data().begin() + static_cast<std::ptrdiff_t>(count * w));
    std::copy(patches.mask.data().begin(), patches.mask.data().end(),
              out.mask.data().begin() + static_cast<std::ptrdiff_t>(count * w));
    return out;
}

std::vector<TrainingExample> make_training_examples(std::span<const std::vector<double>> series_set,
                                                    const PatchDecoderConfig& config) {
    const auto context_length = static_cast<std::size_t>(config.context_length);
    const auto horizon = static_cast<std::size_t>(config.horizon);
    std::vector<TrainingExample> out;
    for (const auto& series : series_set) {
        for (std::size_t t = 1; t < series.size(); ++t) {
            const std::size_t begin = t > context_length ? t - context_length : 0;
            const std::size_t end = std::min(series.size(), t + horizon);
            out.push_back({{series.begin() + static_cast<std::ptrdiff_t>(begin),
                            series.begin() + static_cast<std::ptrdiff_t>(t)},
                           {series.begin() + static_cast<std::ptrdiff_t>(t),
                            series.begin() + static_cast<std::ptrdiff_t>(end)}});
        }
    }
    return out;
}

PatchDecoder::PatchDecoder(PatchDecoderConfig config, std::uint64_t seed)
    : config_(config), seed_(seed) {
    config_.validate();
    numerics::Rng rng(numerics::derive_seed(seed, "init"));
    const auto d = static_cast<std::size_t>(config_.model_dim);
    const auto p = static_cast<std::size_t>(config_.input_patch);
    const auto ff = 4 * d;
    const auto positions = static_cast<std::size_t>(config_.max_patches());
    const auto dd = static_cast<double>(d);

    embed_weight_ = uniform_param({2 * p, d}, 2.0 * static_cast<double>(p), rng);
    embed_bias_ = uniform_param({d}, 2.0 * static_cast<double>(p), rng);
    // The position table acts as the weight of a one-hot affine map.
    positions_ = uniform_param({positions, d}, static_cast<double>(positions), rng);
    for (int l = 0; l < config_.decoder_layers; ++l) {
        Block b;
        b.norm1_gain = filled_param(d, 1.0);
        b.norm1_bias = filled_param(d, 0.0);
        b.query_weight = uniform_param({d, d}, dd, rng);
        b.query_bias = uniform_param({d}, dd, rng);
        b.key_weight = uniform_param({d, d}, dd, rng);
        b.key_bias = uniform_param({d}, dd, rng);
        b.value_weight = uniform_param({d, d}, dd, rng);
        b.value_bias = uniform_param({d}, dd, rng);
        b.proj_weight = uniform_param({d, d}, dd, rng);
        b.proj_bias = uniform_param({d}, dd, rng);
        b.norm2_gain = filled_param(d, 1.0);
        b.norm2_bias = filled_param(d, 0.0);
        b.ff1_weight = uniform_param({d, ff}, dd, rng);
        b.ff1_bias = uniform_param({ff}, dd, rng);
        b.ff2_weight = uniform_param({ff, d}, static_cast<double>(ff), rng);
        b.ff2_bias = uniform_param({d}, static_cast<double>(ff), rng);
        blocks_.push_back(std::move(b));
    }
    final_gain_ = filled_param(d, 1.0);
    final_bias_ = filled_param(d, 0.0);
    head_weight_ = uniform_param({d, static_cast<std::size_t>(config_.output_patch)}, dd, rng);
    head_bias_ = uniform_param({static_cast<std::size_t>(config_.output_patch)}, dd, rng);
}

template <typename Self>
Graph::Var PatchDecoder::forward_impl(Self& self, Graph& g, const Patches& patches) {
    const auto& cfg = self.config_;
    const std::size_t n = patches.count();
    const auto width = static_cast<std::size_t>(cfg.input_patch);
    if (n == 0 || patches.width() != width) {
        throw std::invalid_argument("patch decoder: expected patches of width " + std::to_string(width));
    }
    std::size_t first_valid = n;
    std::vector<bool> valid(n);
    for (std::size_t i = 0; i < n; ++i) {
        valid[i] = patches.patch_valid(i);
        if (valid[i] && first_valid == n) first_valid = i;
    }
    if (first_valid == n) throw std::invalid_argument("patch decoder: every position is masked");
    const auto positions = static_cast<std::size_t>(cfg.max_patches());
    if (n - first_valid > positions) {
        throw std::invalid_argument("patch decoder: " + std::to_string(n - first_valid) +
                                    " patches exceed the " + std::to_string(positions) +
                                    " learned positions");
    }

    Tensor input = Tensor::matrix(n, 2 * width);
    Tensor select = Tensor::matrix(n, positions);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < width; ++c) {
            input.at(i, c) = patches.values.at(i, c);
            input.at(i, width + c) = patches.mask.at(i, c);
        }
        if (i >= first_valid) select.at(i, i - first_valid) = 1.0;
    }
    // Causal attention restricted to patches holding data.
    std::vector<bool> allowed(n * n, false);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) allowed[i * n + j] = valid[j];
    }

    auto x = g.affine(g.constant(std::move(input)), g.parameter(self.embed_weight_),
                      g.parameter(self.embed_bias_));
    x = g.add(x, g.matmul(g.constant(std::move(select)), g.parameter(self.positions_)));

    const auto d = static_cast<std::size_t>(cfg.model_dim);
    const auto heads = static_cast<std::size_t>(cfg.attention_heads);
    const std::size_t head_dim = d / heads;
    const double attn_scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
    for (auto& b : self.blocks_) {
        const auto a = g.layer_norm(x, g.parameter(b.norm1_gain), g.parameter(b.norm1_bias));
        const auto q = g.affine(a, g.parameter(b.query_weight), g.parameter(b.query_bias));
        const auto k = g.affine(a, g.parameter(b.key_weight), g.parameter(b.key_bias));
        const auto v = g.affine(a, g.parameter(b.value_weight), g.parameter(b.value_bias));
        std::vector<Graph::Var> head_out;
        head_out.reserve(heads);
        for (std::size_t h = 0; h < heads; ++h) {
            const std::size_t lo = h * head_dim;
            const std::size_t hi = lo + head_dim;
            const auto scores = g.scale(
                g.matmul_transposed(g.slice_cols(q, lo, hi), g.slice_cols(k, lo, hi)), attn_scale);
            const auto weights = g.masked_softmax(scores, allowed);
            head_out.push_back(g.matmul(weights, g.slice_cols(v, lo, hi)));
        }
        const auto attn = g.affine(g.concat_cols(head_out), g.parameter(b.proj_weight),
                                   g.parameter(b.proj_bias));
        x = g.add(x, attn);
        const auto m = g.layer_norm(x, g.parameter(b.norm2_gain), g.parameter(b.norm2_bias));
        const auto hidden = g.relu(g.affine(m, g.parameter(b.ff1_weight), g.parameter(b.ff1_bias)));
        x = g.add(x, g.affine(hidden, g.parameter(b.ff2_weight), g.parameter(b.ff2_bias)));
    }
    auto last = g.slice_rows(x, n - 1, n);
    last = g.layer_norm(last, g.parameter(self.final_gain_), g.parameter(self.final_bias_));
    return g.affine(last, g.parameter(self.head_weight_), g.parameter(self.head_bias_));
}

template Graph::Var PatchDecoder::forward_impl(PatchDecoder&, Graph&, const Patches&);
template Graph::Var PatchDecoder::forward_impl(const PatchDecoder&, Graph&, const Patches&);

std::vector<double> PatchDecoder::forward_values(const Patches& patches) const {
    Graph g;
    const auto out = g.value(forward(g, patches)).data();
    return {out.begin(), out.end()};
}

namespace {

/// Context shifted so its last value is 0, plus that anchor.
std::pair<std::vector<double>, double> anchor_context(std::span<const double> context) {
    const double anchor = context.back();
    std::vector<double> shifted(context.begin(), context.end());
    for (double& v : shifted) v -= anchor;
    return {std::move(shifted), anchor};
}

}  // namespace

Graph::Var PatchDecoder::example_loss(Graph& g, const TrainingExample& example) {
    if (example.context.empty() || example.target.empty() ||
        example.target.size() > static_cast<std::size_t>(config_.horizon)) {
        throw std::invalid_argument("patch decoder: malformed training example");
    }
    const auto [shifted, anchor] = anchor_context(example.context);
    const auto out = forward(g, patchify(shifted, static_cast<std::size_t>(config_.input_patch)));
    Tensor target = Tensor::matrix(1, example.target.size());
    for (std::size_t i = 0; i < example.target.size(); ++i) target[i] = example.target[i] - anchor;
    return g.mse(g.slice_cols(out, 0, example.target.size()), target);
}

std::vector<Parameter*> PatchDecoder::parameters() {
    std::vector<Parameter*> out = {&embed_weight_, &embed_bias_, &positions_};
    for (auto& b : blocks_) {
        for (Parameter* p : {&b.norm1_gain, &b.norm1_bias, &b.query_weight, &b.query_bias,
                             &b.key_weight, &b.key_bias, &b.value_weight, &b.value_bias,
                             &b.proj_weight, &b.proj_bias, &b.norm2_gain, &b.norm2_bias,
                             &b.ff1_weight, &b.ff1_bias, &b.ff2_weight, &b.ff2_bias}) {
            out.push_back(p);
        }
    }
    for (Parameter* p : {&final_gain_, &final_bias_, &head_weight_, &head_bias_}) out.push_back(p);
    return out;
}

double PatchDecoder::evaluate_mse(const std::vector<TrainingExample>& examples) const {
    double total = 0.0;
    for (const auto& ex : examples) {
        const auto forecast = predict(ex.context, ex.target.size());
        double sq = 0.0;
        for (std::size_t i = 0; i < ex.target.size(); ++i) {
            const double e = forecast[i] - ex.target[i];
            sq += e * e;
        }
        total += sq / static_cast<double>(ex.target.size());
    }
    return total / static_cast<double>(examples.size());
}

void PatchDecoder::fit(std::span<const std::vector<double>> series_set) {
    for (const auto& s : series_set) {
        if (s.size() < 2) throw std::invalid_argument("patch decoder: every training series needs >= 2 points");
    }
    const auto examples = make_training_examples(series_set, config_);
    if (examples.empty()) throw std::invalid_argument("patch decoder: empty training set");

    numerics::Rng rng(numerics::derive_seed(seed_, "shuffle"));
    auto params = parameters();
    numerics::AdamState adam;
    std::vector<std::size_t> order(examples.size());
    const auto batch_size = static_cast<std::size_t>(config_.batch_size);
    loss_history_.clear();
    for (int epoch = 1; epoch <= config_.epochs; ++epoch) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t end = std::min(order.size(), start + batch_size);
            for (auto* p : params) p->zero_grad();
            Graph g;
            auto total = example_loss(g, examples[order[start]]);
            for (std::size_t i = start + 1; i < end; ++i) {
                total = g.add(total, example_loss(g, examples[order[i]]));
            }
            const auto loss = g.scale(total, 1.0 / static_cast<double>(end - start));
            const double value = g.value(loss)[0];
            if (!std::isfinite(value)) throw DivergenceError("patchtf: non-finite training loss", epoch);
            epoch_loss += value * static_cast<double>(end - start);
            g.backward(loss);
            try {
                numerics::adam_step(params, adam, config_.learning_rate);
            } catch (const std::invalid_argument& e) {
                throw DivergenceError(std::string("patchtf: ") + e.what(), epoch);
            }
        }
        loss_history_.push_back(epoch_loss / static_cast<double>(examples.size()));
    }
    training_mse_ = evaluate_mse(examples);
    if (!std::isfinite(training_mse_)) throw DivergenceError("patchtf: non-finite training loss", config_.epochs);
}

std::vector<double> PatchDecoder::predict(std::span<const double> context, std::size_t horizon) const {
    if (horizon > static_cast<std::size_t>(config_.horizon)) {
        throw std::invalid_argument("patch decoder: horizon " + std::to_string(horizon) +
                                    " exceeds the trained horizon " + std::to_string(config_.horizon));
    }
    if (context.empty()) throw std::invalid_argument("patch decoder: empty context");
    if (horizon == 0) return {};
    const auto keep = std::min(context.size(), static_cast<std::size_t>(config_.context_length));
    const auto [shifted, anchor] = anchor_context(context.subspan(context.size() - keep));
    const auto raw = forward_values(patchify(shifted, static_cast<std::size_t>(config_.input_patch)));
    std::vector<double> out(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(horizon));
    for (double& v : out) {
        v += anchor;
        if (!std::isfinite(v)) throw std::runtime_error("patch decoder: non-finite forecast");
    }
    return out;
}

PatchDecoderForecaster::PatchDecoderForecaster(PatchDecoderConfig config, std::uint64_t seed)
    : config_(config), seed_(seed) {
    config_.validate();
}

PatchDecoderForecaster::PatchDecoderForecaster(std::shared_ptr<const PatchDecoder> trained)
    : config_(trained->config()), model_(std::move(trained)), owns_training_(false) {}

void PatchDecoderForecaster::fit(const TrainingSeries& train) {
    if (train.values.empty()) throw std::invalid_argument("patchtf: empty training series");
    if (owns_training_) {
        auto model = std::make_shared<PatchDecoder>(config_, seed_);
        const std::vector<std::vector<double>> set = {train.values};
        model->fit(set);
        model_ = std::move(model);
    }
    context_ = train.values;
}

std::vector<double> PatchDecoderForecaster::predict(std::size_t horizon) const {
    if (!model_ || context_.empty()) throw std::logic_error("patchtf: predict before fit");
    return model_->predict(context_, horizon);
}

}  // namespace popcast::forecast
