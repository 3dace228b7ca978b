#include "popcast/numerics/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace popcast::numerics {

void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads,
               AdamState& state, double learning_rate) {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("adam_step: learning rate must be > 0");
    if (params.size() != grads.size()) {
        throw std::invalid_argument("adam_step: parameter and gradient counts differ");
    }
    const bool fresh = state.first_moment.empty() && state.second_moment.empty();
    if (!fresh && (state.first_moment.size() != params.size() ||
                   state.second_moment.size() != params.size())) {
        throw std::invalid_argument("adam_step: state does not match the parameter list");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]->same_shape(*grads[i])) {
            throw std::invalid_argument("adam_step: gradient " + std::to_string(i) + " has shape " +
                                        grads[i]->shape_string() + ", parameter has " +
                                        params[i]->shape_string());
        }
        if (!fresh && !state.first_moment[i].same_shape(*params[i])) {
            throw std::invalid_argument("adam_step: moment shape mismatch at " + std::to_string(i));
        }
        if (!grads[i]->all_finite()) {
            throw std::invalid_argument("adam_step: non-finite gradient in tensor " + std::to_string(i));
        }
    }
    if (fresh) {
        for (const Tensor* p : params) {
            state.first_moment.emplace_back(p->shape());
            state.second_moment.emplace_back(p->shape());
        }
    }

    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(state.beta1, t);
    const double correction2 = 1.0 - std::pow(state.beta2, t);
    using Array = Eigen::Map<Eigen::ArrayXd>;
    using ConstArray = Eigen::Map<const Eigen::ArrayXd>;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto n = static_cast<Eigen::Index>(params[i]->size());
        Array p(params[i]->data().data(), n);
        ConstArray g(grads[i]->data().data(), n);
        Array m(state.first_moment[i].data().data(), n);
        Array v(state.second_moment[i].data().data(), n);
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g * g;
        p -= learning_rate * (m / correction1) / ((v / correction2).sqrt() + state.epsilon);
    }
}

void adam_step(std::span<Parameter* const> params, AdamState& state, double learning_rate) {
    std::vector<Tensor*> values;
    std::vector<const Tensor*> grads;
    values.reserve(params.size());
    grads.reserve(params.size());
    for (Parameter* p : params) {
        values.push_back(&p->value);
        grads.push_back(&p->grad);
    }
    adam_step(values, grads, state, learning_rate);
}

}  // namespace popcast::numerics
