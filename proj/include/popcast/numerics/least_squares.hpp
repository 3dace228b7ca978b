#pragma once

#include <span>

namespace popcast::numerics {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;

    [[nodiscard]] double operator()(double x) const { return intercept + slope * x; }
};

/// Ordinary least squares line through (x, y), computed from centered sums.
/// Throws std::invalid_argument for a length mismatch, fewer than 2 points or
/// constant x.
LineFit ols_fit(std::span<const double> x, std::span<const double> y);

}  // namespace popcast::numerics
