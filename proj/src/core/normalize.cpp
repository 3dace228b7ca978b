#include "popcast/core/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace popcast {

namespace {

void require_finite(std::span<const double> values, const char* op) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw std::invalid_argument(std::string(op) + ": non-finite value at index " +
                                        std::to_string(i));
        }
    }
}

}  // namespace

NormParams minmax_fit(std::span<const double> train) {
    if (train.empty()) throw std::invalid_argument("minmax_fit: empty training data");
    require_finite(train, "minmax_fit");
    const auto [lo, hi] = std::minmax_element(train.begin(), train.end());
    return {*lo, *hi, *lo == *hi};
}

NormParams minmax_fit(const AnnualSeries& train) { return minmax_fit(train.values()); }

std::vector<double> minmax_apply(const NormParams& params, std::span<const double> values) {
    require_finite(values, "minmax_apply");
    std::vector<double> out(values.size(), 0.0);
    if (params.degenerate) return out;
    const double range = params.max_value - params.min_value;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = (values[i] - params.min_value) / range;
    }
    return out;
}

std::vector<double> minmax_invert(const NormParams& params, std::span<const double> normalized) {
    require_finite(normalized, "minmax_invert");
    std::vector<double> out(normalized.size(), params.min_value);
    if (params.degenerate) return out;
    const double range = params.max_value - params.min_value;
    for (std::size_t i = 0; i < normalized.size(); ++i) {
        out[i] = normalized[i] * range + params.min_value;
    }
    return out;
}

}  // namespace popcast
