#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "popcast/numerics/tensor.hpp"

namespace popcast::numerics {

/// A trainable tensor and its accumulated gradient.
struct Parameter {
    Tensor value;
    Tensor grad;

    Parameter() = default;
    explicit Parameter(Tensor v) : value(std::move(v)), grad(value.shape()) {}
    void zero_grad() { grad.fill(0.0); }
};

/// Reverse-mode tape over small dense matrices. Operations append nodes, so
/// every node's inputs precede it. One Graph per forward/backward pass.
///
/// Shapes follow Tensor's matrix view (rows x cols). Biases and layer-norm
/// gains are vectors matching the column count.
class Graph {
public:
    struct Var {
        std::size_t id = 0;
    };

    Var constant(Tensor value);
    /// Leaf bound to `p`, read in place; repeated calls share one node. `p`
    /// must outlive the graph and keep its value until backward() is done.
    Var parameter(Parameter& p);
    /// Read-only binding for inference: a constant copy, no gradient.
    Var parameter(const Parameter& p) { return constant(p.value); }

    [[nodiscard]] const Tensor& value(Var v) const {
        const auto& node = nodes_[v.id];
        return node.param ? node.param->value : node.value;
    }
    /// Gradient of the last backward() loss w.r.t. `v` (zeros when unreached).
    /// For a parameter leaf this is the bound Parameter's grad, which backward()
    /// adds into rather than resets.
    [[nodiscard]] Tensor grad(Var v) const;
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

    /// x * weight + bias, weight is (in x out).
    Var affine(Var x, Var weight, Var bias);
    Var matmul(Var a, Var b);
    /// a * b^T
    Var matmul_transposed(Var a, Var b);
    Var add(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double factor);
    Var tanh(Var x);
    Var sigmoid(Var x);
    Var relu(Var x);
    /// Softmax along each row.
    Var softmax(Var x);
    /// Row softmax restricted to entries with allowed[i] == true; others get
    /// probability 0. A row with nothing allowed becomes all zeros.
    Var masked_softmax(Var x, std::vector<bool> allowed);
    Var concat_cols(std::span<const Var> parts);
    Var concat_rows(std::span<const Var> parts);
    Var slice_cols(Var x, std::size_t begin, std::size_t end);
    Var slice_rows(Var x, std::size_t begin, std::size_t end);
    /// Per-row standardization followed by gain * x_hat + bias.
    Var layer_norm(Var x, Var gain, Var bias, double epsilon = 1e-5);
    /// Mean of squared differences against a constant target of the same shape.
    Var mse(Var prediction, const Tensor& target);

    /// Back-propagates from a single-element node, adding into each bound
    /// Parameter's grad. Throws std::invalid_argument if `loss` is
    /// not scalar.
    void backward(Var loss);

private:
    using BackwardFn = std::function<void(Graph&, std::size_t)>;

    struct Node {
        Tensor value;
        Tensor grad;
        bool requires_grad = false;
        Parameter* param = nullptr;
        BackwardFn backward;
    };

    Var push(Tensor value, bool requires_grad, BackwardFn fn);
    Tensor& grad_ref(std::size_t id);
    bool needs(Var v) const { return nodes_[v.id].requires_grad; }
    void check(Var v) const;

    std::vector<Node> nodes_;
    std::unordered_map<Parameter*, std::size_t> param_nodes_;
};

}  // namespace popcast::numerics
