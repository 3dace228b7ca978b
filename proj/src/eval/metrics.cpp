#include "popcast/eval/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace popcast::eval {

double mse(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) {
        throw std::invalid_argument("mse: lengths differ (" + std::to_string(actual.size()) + " vs " +
                                    std::to_string(predicted.size()) + ")");
    }
    if (actual.empty()) throw std::invalid_argument("mse: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (!std::isfinite(actual[i]) || !std::isfinite(predicted[i])) {
            throw std::invalid_argument("mse: non-finite value at index " + std::to_string(i));
        }
        const double e = actual[i] - predicted[i];
        sum += e * e;
    }
    return sum / static_cast<double>(actual.size());
}

double PercentError::rounded() const {
    // std::round is half-away-from-zero.
    const double r = std::round(value * 100.0) / 100.0;
    return r == 0.0 ? 0.0 : r;
}

std::string PercentError::display() const {
    const double r = rounded();
    char buf[64];
    std::snprintf(buf, sizeof(buf), r > 0.0 ? "+%.2f%%" : "%.2f%%", r);
    return buf;
}

PercentError percent_error(double predicted, double actual) {
    if (actual == 0.0) throw std::invalid_argument("percent_error: actual value is zero");
    return {100.0 * (predicted - actual) / actual};
}

}  // namespace popcast::eval
