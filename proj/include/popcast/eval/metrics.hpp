#pragma once

#include <span>
#include <string>

namespace popcast::eval {

/// (1/n) sum (actual - predicted)^2. Throws on empty or mismatched inputs and
/// non-finite values.
double mse(std::span<const double> actual, std::span<const double> predicted);

struct PercentError {
    double value = 0.0;  // unrounded, percent
    /// Rounded half away from zero to 2 decimals, signed: "+0.02%", "-1.42%", "0.00%".
    [[nodiscard]] std::string display() const;
    [[nodiscard]] double rounded() const;
};

/// 100 (predicted - actual) / actual. Throws std::invalid_argument when actual is 0.
PercentError percent_error(double predicted, double actual);

}  // namespace popcast::eval
