#include "popcast/numerics/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace popcast::numerics {

namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
    if (shape.size() > 3) throw std::invalid_argument("Tensor: rank above 3 is not supported");
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(data.begin(), data.end()) {
    if (element_count(shape_) != data_.size()) {
        throw std::invalid_argument("Tensor: shape " + shape_string() + " does not match " +
                                    std::to_string(data_.size()) + " values");
    }
    if (!all_finite()) throw std::invalid_argument("Tensor: non-finite entry");
}

Tensor Tensor::row(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({1, n}, std::move(values));
}

bool Tensor::all_finite() const {
    // Branch-free so it vectorizes: a double is non-finite iff its exponent bits are all set.
    constexpr std::uint64_t kExponent = 0x7ff0000000000000ULL;
    std::uint64_t non_finite = 0;
    for (const double v : data_) {
        non_finite |= static_cast<std::uint64_t>((std::bit_cast<std::uint64_t>(v) & kExponent) == kExponent);
    }
    return non_finite == 0;
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string Tensor::shape_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(shape_[i]);
    }
    return s + "]";
}

}  // namespace popcast::numerics
