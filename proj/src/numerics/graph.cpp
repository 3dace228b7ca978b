#include "popcast/numerics/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace popcast::numerics {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using ArrayMap = Eigen::Map<Eigen::ArrayXd>;
using ConstArrayMap = Eigen::Map<const Eigen::ArrayXd>;

MatrixMap mat(Tensor& t) {
    return {t.data().data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}
ConstMatrixMap mat(const Tensor& t) {
    return {t.data().data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}
ArrayMap arr(Tensor& t) { return {t.data().data(), static_cast<Eigen::Index>(t.size())}; }
ConstArrayMap arr(const Tensor& t) {
    return {t.data().data(), static_cast<Eigen::Index>(t.size())};
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
    throw std::invalid_argument(std::string("Graph::") + op + ": incompatible shapes " +
                                a.shape_string() + " and " + b.shape_string());
}

}  // namespace

Graph::Var Graph::push(Tensor value, bool requires_grad, BackwardFn fn) {
    Node node;
    node.value = std::move(value);
    node.requires_grad = requires_grad;
    if (requires_grad) node.backward = std::move(fn);
    nodes_.push_back(std::move(node));
    return {nodes_.size() - 1};
}

void Graph::check(Var v) const {
    if (v.id >= nodes_.size()) throw std::out_of_range("Graph: unknown variable");
}

Tensor& Graph::grad_ref(std::size_t id) {
    auto& node = nodes_[id];
    Tensor& grad = node.param ? node.param->grad : node.grad;
    const Tensor& val = node.param ? node.param->value : node.value;
    if (grad.size() != val.size() || grad.shape() != val.shape()) grad = Tensor(val.shape(), 0.0);
    return grad;
}

Tensor Graph::grad(Var v) const {
    check(v);
    const auto& node = nodes_[v.id];
    const Tensor& grad = node.param ? node.param->grad : node.grad;
    if (grad.shape() == value(v).shape() && grad.size() == value(v).size()) return grad;
    return Tensor(value(v).shape(), 0.0);
}

Graph::Var Graph::constant(Tensor value) { return push(std::move(value), false, nullptr); }

Graph::Var Graph::parameter(Parameter& p) {
    if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return {it->second};
    Node node;
    node.requires_grad = true;
    node.param = &p;
    nodes_.push_back(std::move(node));
    param_nodes_.emplace(&p, nodes_.size() - 1);
    return {nodes_.size() - 1};
}

Graph::Var Graph::affine(Var x, Var weight, Var bias) {
    check(x), check(weight), check(bias);
    const auto& xv = value(x);
    const auto& wv = value(weight);
    const auto& bv = value(bias);
    if (xv.cols() != wv.rows()) shape_error("affine", xv, wv);
    if (bv.size() != wv.cols()) shape_error("affine", wv, bv);
    Tensor out = Tensor::matrix(xv.rows(), wv.cols());
    auto o = mat(out);
    o.noalias() = mat(xv) * mat(wv);
    o.rowwise() += ConstMatrixMap(bv.data().data(), 1, static_cast<Eigen::Index>(bv.size())).row(0);
    return push(std::move(out), needs(x) || needs(weight) || needs(bias),
                [x, weight, bias](Graph& g, std::size_t self) {
                    const auto dy = mat(g.nodes_[self].grad);
                    if (g.needs(x)) mat(g.grad_ref(x.id)).noalias() += dy * mat(g.value(weight)).transpose();
                    if (g.needs(weight)) mat(g.grad_ref(weight.id)).noalias() += mat(g.value(x)).transpose() * dy;
                    if (g.needs(bias)) {
                        auto& db = g.grad_ref(bias.id);
                        MatrixMap(db.data().data(), 1, static_cast<Eigen::Index>(db.size())) +=
                            dy.colwise().sum();
                    }
                });
}

Graph::Var Graph::matmul(Var a, Var b) {
    check(a), check(b);
    const auto& av = value(a);
    const auto& bv = value(b);
    if (av.cols() != bv.rows()) shape_error("matmul", av, bv);
    Tensor out = Tensor::matrix(av.rows(), bv.cols());
    mat(out).noalias() = mat(av) * mat(bv);
    return push(std::move(out), needs(a) || needs(b), [a, b](Graph& g, std::size_t self) {
        const auto dy = mat(g.nodes_[self].grad);
        if (g.needs(a)) mat(g.grad_ref(a.id)).noalias() += dy * mat(g.value(b)).transpose();
        if (g.needs(b)) mat(g.grad_ref(b.id)).noalias() += mat(g.value(a)).transpose() * dy;
    });
}

Graph::Var Graph::matmul_transposed(Var a, Var b) {
    check(a), check(b);
    const auto& av = value(a);
    const auto& bv = value(b);
    if (av.cols() != bv.cols()) shape_error("matmul_transposed", av, bv);
    Tensor out = Tensor::matrix(av.rows(), bv.rows());
    mat(out).noalias() = mat(av) * mat(bv).transpose();
    return push(std::move(out), needs(a) || needs(b), [a, b](Graph& g, std::size_t self) {
        const auto dy = mat(g.nodes_[self].grad);
        if (g.needs(a)) mat(g.grad_ref(a.id)).noalias() += dy * mat(g.value(b));
        if (g.needs(b)) mat(g.grad_ref(b.id)).noalias() += dy.transpose() * mat(g.value(a));
    });
}

Graph::Var Graph::add(Var a, Var b) {
    check(a), check(b);
    const auto& av = value(a);
    const auto& bv = value(b);
    if (av.size() != bv.size() || av.cols() != bv.cols()) shape_error("add", av, bv);
    Tensor out = av;
    arr(out) += arr(bv);
    return push(std::move(out), needs(a) || needs(b), [a, b](Graph& g, std::size_t self) {
        const auto dy = arr(g.nodes_[self].grad);
        if (g.needs(a)) arr(g.grad_ref(a.id)) += dy;
        if (g.needs(b)) arr(g.grad_ref(b.id)) += dy;
    });
}

Graph::Var Graph::mul(Var a, Var b) {
    check(a), check(b);
    const auto& av = value(a);
    const auto& bv = value(b);
    if (av.size() != bv.size() || av.cols() != bv.cols()) shape_error("mul", av, bv);
    Tensor out = av;
    arr(out) *= arr(bv);
    return push(std::move(out), needs(a) || needs(b), [a, b](Graph& g, std::size_t self) {
        const auto dy = arr(g.nodes_[self].grad);
        if (g.needs(a)) arr(g.grad_ref(a.id)) += dy * arr(g.value(b));
        if (g.needs(b)) arr(g.grad_ref(b.id)) += dy * arr(g.value(a));
    });
}

Graph::Var Graph::scale(Var a, double factor) {
    check(a);
    Tensor out = value(a);
    arr(out) *= factor;
    return push(std::move(out), needs(a), [a, factor](Graph& g, std::size_t self) {
        arr(g.grad_ref(a.id)) += factor * arr(g.nodes_[self].grad);
    });
}

Graph::Var Graph::tanh(Var x) {
    check(x);
    Tensor out = value(x);
    // 1 - 2/(e^{2x} + 1), vectorized through exp; saturates cleanly at +-1.
    arr(out) = 1.0 - 2.0 / ((2.0 * arr(out)).exp() + 1.0);
    return push(std::move(out), needs(x), [x](Graph& g, std::size_t self) {
        const auto y = arr(g.nodes_[self].value);
        arr(g.grad_ref(x.id)) += arr(g.nodes_[self].grad) * (1.0 - y.square());
    });
}

Graph::Var Graph::sigmoid(Var x) {
    check(x);
    Tensor out = value(x);
    arr(out) = 1.0 / (1.0 + (-arr(out)).exp());
    return push(std::move(out), needs(x), [x](Graph& g, std::size_t self) {
        const auto y = arr(g.nodes_[self].value);
        arr(g.grad_ref(x.id)) += arr(g.nodes_[self].grad) * y * (1.0 - y);
    });
}

Graph::Var Graph::relu(Var x) {
    check(x);
    Tensor out = value(x);
    arr(out) = arr(out).max(0.0);
    return push(std::move(out), needs(x), [x](Graph& g, std::size_t self) {
        const auto in = arr(g.value(x));
        arr(g.grad_ref(x.id)) += (in > 0.0).select(arr(g.nodes_[self].grad), 0.0);
    });
}

namespace {

void softmax_rows(Tensor& t, const std::vector<bool>* allowed) {
    const std::size_t rows = t.rows();
    const std::size_t cols = t.cols();
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = t.data().data() + r * cols;
        auto ok = [&](std::size_t c) { return !allowed || (*allowed)[r * cols + c]; };
        double max = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < cols; ++c) {
            if (ok(c)) max = std::max(max, row[c]);
        }
        if (!std::isfinite(max)) {
            std::fill(row, row + cols, 0.0);
            continue;
        }
        double sum = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            row[c] = ok(c) ? std::exp(row[c] - max) : 0.0;
            sum += row[c];
        }
        for (std::size_t c = 0; c < cols; ++c) row[c] /= sum;
    }
}

void softmax_backward(const Tensor& y, const Tensor& dy, Tensor& dx) {
    const std::size_t cols = y.cols();
    for (std::size_t r = 0; r < y.rows(); ++r) {
        const double* yr = y.data().data() + r * cols;
        const double* dyr = dy.data().data() + r * cols;
        double dot = 0.0;
        for (std::size_t c = 0; c < cols; ++c) dot += yr[c] * dyr[c];
        double* dxr = dx.data().data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) dxr[c] += yr[c] * (dyr[c] - dot);
    }
}

}  // namespace

Graph::Var Graph::softmax(Var x) {
    check(x);
    Tensor out = value(x);
    softmax_rows(out, nullptr);
    return push(std::move(out), needs(x), [x](Graph& g, std::size_t self) {
        softmax_backward(g.nodes_[self].value, g.nodes_[self].grad, g.grad_ref(x.id));
    });
}

Graph::Var Graph::masked_softmax(Var x, std::vector<bool> allowed) {
    check(x);
    if (allowed.size() != value(x).size()) {
        throw std::invalid_argument("Graph::masked_softmax: mask size mismatch");
    }
    Tensor out = value(x);
    softmax_rows(out, &allowed);
    // Masked entries have y == 0, so the plain softmax backward zeroes them.
    return push(std::move(out), needs(x), [x](Graph& g, std::size_t self) {
        softmax_backward(g.nodes_[self].value, g.nodes_[self].grad, g.grad_ref(x.id));
    });
}

Graph::Var Graph::concat_cols(std::span<const Var> parts) {
    if (parts.empty()) throw std::invalid_argument("Graph::concat_cols: no inputs");
    const std::size_t rows = value(parts[0]).rows();
    std::size_t cols = 0;
    bool any_grad = false;
    for (Var p : parts) {
        check(p);
        if (value(p).rows() != rows) shape_error("concat_cols", value(parts[0]), value(p));
        cols += value(p).cols();
        any_grad = any_grad || needs(p);
    }
    Tensor out = Tensor::matrix(rows, cols);
    std::size_t offset = 0;
    for (Var p : parts) {
        const auto& pv = value(p);
        mat(out).middleCols(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(pv.cols())) = mat(pv);
        offset += pv.cols();
    }
    std::vector<Var> inputs(parts.begin(), parts.end());
    return push(std::move(out), any_grad, [inputs](Graph& g, std::size_t self) {
        const auto dy = mat(g.nodes_[self].grad);
        std::size_t offset = 0;
        for (Var p : inputs) {
            const auto c = static_cast<Eigen::Index>(g.value(p).cols());
            if (g.needs(p)) mat(g.grad_ref(p.id)) += dy.middleCols(static_cast<Eigen::Index>(offset), c);
            offset += static_cast<std::size_t>(c);
        }
    });
}

Graph::Var Graph::concat_rows(std::span<const Var> parts) {
    if (parts.empty()) throw std::invalid_argument("Graph::concat_rows: no inputs");
    const std::size_t cols = value(parts[0]).cols();
    std::size_t rows = 0;
    bool any_grad = false;
    for (Var p : parts) {
        check(p);
        if (value(p).cols() != cols) shape_error("concat_rows", value(parts[0]), value(p));
        rows += value(p).rows();
        any_grad = any_grad || needs(p);
    }
    Tensor out = Tensor::matrix(rows, cols);
    std::size_t offset = 0;
    for (Var p : parts) {
        const auto& pv = value(p);
        mat(out).middleRows(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(pv.rows())) = mat(pv);
        offset += pv.rows();
    }
    std::vector<Var> inputs(parts.begin(), parts.end());
    return push(std::move(out), any_grad, [inputs](Graph& g, std::size_t self) {
        const auto dy = mat(g.nodes_[self].grad);
        std::size_t offset = 0;
        for (Var p : inputs) {
            const auto r = static_cast<Eigen::Index>(g.value(p).rows());
            if (g.needs(p)) mat(g.grad_ref(p.id)) += dy.middleRows(static_cast<Eigen::Index>(offset), r);
            offset += static_cast<std::size_t>(r);
        }
    });
}

Graph::Var Graph::slice_cols(Var x, std::size_t begin, std::size_t end) {
    check(x);
    const auto& xv = value(x);
    if (begin >= end || end > xv.cols()) {
        throw std::invalid_argument("Graph::slice_cols: bad range for " + xv.shape_string());
    }
    Tensor out = Tensor::matrix(xv.rows(), end - begin);
    const auto b = static_cast<Eigen::Index>(begin);
    const auto n = static_cast<Eigen::Index>(end - begin);
    mat(out) = mat(xv).middleCols(b, n);
    return push(std::move(out), needs(x), [x, b, n](Graph& g, std::size_t self) {
        mat(g.grad_ref(x.id)).middleCols(b, n) += mat(g.nodes_[self].grad);
    });
}

Graph::Var Graph::slice_rows(Var x, std::size_t begin, std::size_t end) {
    check(x);
    const auto& xv = value(x);
    if (begin >= end || end > xv.rows()) {
        throw std::invalid_argument("Graph::slice_rows: bad range for " + xv.shape_string());
    }
    Tensor out = Tensor::matrix(end - begin, xv.cols());
    const auto b = static_cast<Eigen::Index>(begin);
    const auto n = static_cast<Eigen::Index>(end - begin);
    mat(out) = mat(xv).middleRows(b, n);
    return push(std::move(out), needs(x), [x, b, n](Graph& g, std::size_t self) {
        mat(g.grad_ref(x.id)).middleRows(b, n) += mat(g.nodes_[self].grad);
    });
}

Graph::Var Graph::layer_norm(Var x, Var gain, Var bias, double epsilon) {
    check(x), check(gain), check(bias);
    const auto& xv = value(x);
    const std::size_t rows = xv.rows();
    const std::size_t cols = xv.cols();
    if (value(gain).size() != cols || value(bias).size() != cols) {
        shape_error("layer_norm", xv, value(gain));
    }
    Tensor normalized = xv;
    std::vector<double> inv_std(rows);
    auto xhat = mat(normalized);
    for (std::size_t r = 0; r < rows; ++r) {
        auto row = xhat.row(static_cast<Eigen::Index>(r));
        const double mean = row.mean();
        row.array() -= mean;
        const double var = row.squaredNorm() / static_cast<double>(cols);
        inv_std[r] = 1.0 / std::sqrt(var + epsilon);
        row *= inv_std[r];
    }
    Tensor out = normalized;
    const auto gv = ConstMatrixMap(value(gain).data().data(), 1, static_cast<Eigen::Index>(cols));
    const auto bv = ConstMatrixMap(value(bias).data().data(), 1, static_cast<Eigen::Index>(cols));
    auto o = mat(out);
    for (std::size_t r = 0; r < rows; ++r) {
        auto row = o.row(static_cast<Eigen::Index>(r));
        row = row.cwiseProduct(gv) + bv;
    }
    return push(std::move(out), needs(x) || needs(gain) || needs(bias),
                [x, gain, bias, normalized = std::move(normalized), inv_std = std::move(inv_std)](
                    Graph& g, std::size_t self) {
                    const auto dy = mat(g.nodes_[self].grad);
                    const auto xh = mat(normalized);
                    const auto cols = dy.cols();
                    if (g.needs(gain)) {
                        auto& dg = g.grad_ref(gain.id);
                        MatrixMap(dg.data().data(), 1, cols) += dy.cwiseProduct(xh).colwise().sum();
                    }
                    if (g.needs(bias)) {
                        auto& db = g.grad_ref(bias.id);
                        MatrixMap(db.data().data(), 1, cols) += dy.colwise().sum();
                    }
                    if (g.needs(x)) {
                        const auto gv = ConstMatrixMap(g.value(gain).data().data(), 1, cols);
                        auto dx = mat(g.grad_ref(x.id));
                        const double n = static_cast<double>(cols);
                        for (Eigen::Index r = 0; r < dy.rows(); ++r) {
                            const Eigen::RowVectorXd dxh = dy.row(r).cwiseProduct(gv);
                            const double sum_dxh = dxh.sum();
                            const double sum_dxh_xh = dxh.dot(xh.row(r));
                            dx.row(r) += (inv_std[static_cast<std::size_t>(r)] / n) *
                                         (n * dxh.array() - sum_dxh - xh.row(r).array() * sum_dxh_xh)
                                             .matrix();
                        }
                    }
                });
}

Graph::Var Graph::mse(Var prediction, const Tensor& target) {
    check(prediction);
    const auto& pv = value(prediction);
    if (pv.size() != target.size() || pv.cols() != target.cols() || pv.size() == 0) shape_error("mse", pv, target);
    Tensor diff = pv;
    arr(diff) -= arr(target);
    const double n = static_cast<double>(diff.size());
    Tensor out = Tensor::scalar(arr(diff).square().sum() / n);
    return push(std::move(out), needs(prediction),
                [prediction, diff = std::move(diff), n](Graph& g, std::size_t self) {
                    const double dl = g.nodes_[self].grad[0];
                    arr(g.grad_ref(prediction.id)) += (2.0 * dl / n) * arr(diff);
                });
}

void Graph::backward(Var loss) {
    check(loss);
    if (value(loss).size() != 1) {
        throw std::invalid_argument("Graph::backward: loss must be scalar, got shape " +
                                    value(loss).shape_string());
    }
    for (auto& node : nodes_) node.grad = Tensor();
    grad_ref(loss.id)[0] = 1.0;
    for (std::size_t i = loss.id + 1; i-- > 0;) {
        auto& node = nodes_[i];
        if (node.grad.size() == 0 || !node.requires_grad) continue;
        if (node.backward) node.backward(*this, i);
    }
}

}  // namespace popcast::numerics
