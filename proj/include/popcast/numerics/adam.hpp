#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "popcast/numerics/graph.hpp"
#include "popcast/numerics/tensor.hpp"

namespace popcast::numerics {

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::vector<Tensor> first_moment;
    std::vector<Tensor> second_moment;
    std::uint64_t step_count = 0;
};

/// One bias-corrected Adam update. Moments are created on the first call.
/// Throws std::invalid_argument (leaving everything untouched) on a shape
/// mismatch, a non-finite gradient or a non-positive learning rate.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads,
               AdamState& state, double learning_rate);

/// Same, reading gradients from each Parameter.
void adam_step(std::span<Parameter* const> params, AdamState& state, double learning_rate);

}  // namespace popcast::numerics
