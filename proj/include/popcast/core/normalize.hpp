#pragma once

#include <span>
#include <vector>

#include "popcast/core/series.hpp"

namespace popcast {

/// Min-max scaling fitted on a training window. A constant window is
/// degenerate: everything maps to 0 and inverts to the constant.
struct NormParams {
    double min_value = 0.0;
    double max_value = 0.0;
    bool degenerate = true;

    bool operator==(const NormParams&) const = default;
};

NormParams minmax_fit(std::span<const double> train);
NormParams minmax_fit(const AnnualSeries& train);

/// (v - min) / (max - min), unclamped. Throws on non-finite input.
std::vector<double> minmax_apply(const NormParams& params, std::span<const double> values);

/// n * (max - min) + min. Throws on non-finite input.
std::vector<double> minmax_invert(const NormParams& params, std::span<const double> normalized);

}  // namespace popcast
