#include "popcast/forecast/config.hpp"

#include <stdexcept>

namespace popcast::forecast {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void ArimaConfig::validate() const {
    require(max_p >= 0 && max_d >= 0 && max_q >= 0, "arima: search bounds must be >= 0");
    require(max_iters >= 1, "arima: max_iters must be >= 1");
    require(tolerance > 0.0, "arima: tolerance must be > 0");
}

void RecurrentConfig::validate() const {
    require(layers >= 1, "rnn: layers must be >= 1");
    require(hidden_units >= 1, "rnn: hidden_units must be >= 1");
    require(window >= 1, "rnn: window must be >= 1");
    require(learning_rate > 0.0, "rnn: learning_rate must be > 0");
    require(epochs >= 1, "rnn: epochs must be >= 1");
}

void PatchDecoderConfig::validate() const {
    require(context_length >= 1 && horizon >= 1 && input_patch >= 1 && output_patch >= 1,
            "patchtf: lengths must be >= 1");
    require(context_length >= input_patch, "patchtf: context_length must be >= input_patch");
    require(horizon <= output_patch, "patchtf: horizon must not exceed output_patch");
    require(model_dim >= 1 && attention_heads >= 1 && decoder_layers >= 1,
            "patchtf: model sizes must be >= 1");
    require(model_dim % attention_heads == 0, "patchtf: model_dim must be divisible by attention_heads");
    require(learning_rate > 0.0, "patchtf: learning_rate must be > 0");
    require(batch_size >= 1 && epochs >= 1, "patchtf: batch_size and epochs must be >= 1");
}

}  // namespace popcast::forecast
