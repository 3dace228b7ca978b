#pragma once

#include <functional>
#include <span>
#include <vector>

namespace popcast::numerics {

struct NelderMeadOptions {
    int max_iters = 2000;
    /// Stop once every vertex is within this distance (max-norm) of the best.
    double tolerance = 1e-8;
    /// Offset of the initial vertices along each axis.
    double initial_step = 0.1;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free simplex minimization (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Non-finite objective values away from x0 are
/// treated as +infinity. The result never scores worse than x0.
/// Throws std::invalid_argument if the objective is non-finite at x0, x0 is
/// empty or max_iters < 1.
NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

}  // namespace popcast::numerics
