#include "popcast/numerics/least_squares.hpp"

#include <cmath>
#include <stdexcept>

namespace popcast::numerics {

LineFit ols_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("ols_fit: x and y lengths differ");
    if (x.size() < 2) throw std::invalid_argument("ols_fit: need at least 2 points");
    const double n = static_cast<double>(x.size());
    // Means as offsets from the first point, so constant data gives exact means.
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i] - x[0];
        mean_y += y[i] - y[0];
    }
    mean_x = x[0] + mean_x / n;
    mean_y = y[0] + mean_y / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        sxx += dx * dx;
        sxy += dx * (y[i] - mean_y);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols_fit: x values are all equal");
    const double slope = sxy / sxx;
    return {slope, mean_y - slope * mean_x};
}

}  // namespace popcast::numerics
