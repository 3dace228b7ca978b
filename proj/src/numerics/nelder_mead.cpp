#include "popcast/numerics/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace popcast::numerics {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> x0,
                             const NelderMeadOptions& options) {
    if (x0.empty()) throw std::invalid_argument("nelder_mead: empty starting point");
    if (options.max_iters < 1) throw std::invalid_argument("nelder_mead: max_iters must be >= 1");
    const double f0 = objective(x0);
    if (!std::isfinite(f0)) throw std::invalid_argument("nelder_mead: objective is non-finite at x0");

    auto eval = [&](std::span<const double> x) {
        const double f = objective(x);
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    };

    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fx(n + 1, f0);
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] += options.initial_step;
        fx[i + 1] = eval(simplex[i + 1]);
    }

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Index tie-break keeps the ordering deterministic.
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return fx[a] < fx[b] || (fx[a] == fx[b] && a < b);
        });
        std::vector<std::vector<double>> s(n + 1);
        std::vector<double> f(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            s[k] = std::move(simplex[order[k]]);
            f[k] = fx[order[k]];
        }
        simplex = std::move(s);
        fx = std::move(f);
    };
    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                d = std::max(d, std::abs(simplex[k][i] - simplex[0][i]));
            }
        }
        return d;
    };
    auto along = [&](const std::vector<double>& from, const std::vector<double>& to, double t) {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = from[i] + t * (to[i] - from[i]);
        return p;
    };

    NelderMeadResult result;
    sort_simplex();
    int iter = 0;
    for (; iter < options.max_iters; ++iter) {
        if (diameter() < options.tolerance) {
            result.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto& worst = simplex[n];
        const auto reflected = along(centroid, worst, -kReflect);
        const double fr = eval(reflected);
        if (fr < fx[0]) {
            auto expanded = along(centroid, worst, -kExpand);
            const double fe = eval(expanded);
            if (fe < fr) {
                worst = std::move(expanded);
                fx[n] = fe;
            } else {
                worst = reflected;
                fx[n] = fr;
            }
        } else if (fr < fx[n - 1]) {
            worst = reflected;
            fx[n] = fr;
        } else {
            const bool outside = fr < fx[n];
            auto contracted = outside ? along(centroid, reflected, kContract)
                                      : along(centroid, worst, kContract);
            const double fc = eval(contracted);
            if (fc < (outside ? fr : fx[n])) {
                worst = std::move(contracted);
                fx[n] = fc;
            } else {
                for (std::size_t k = 1; k <= n; ++k) {
                    simplex[k] = along(simplex[0], simplex[k], kShrink);
                    fx[k] = eval(simplex[k]);
                }
            }
        }
        sort_simplex();
    }
    if (!result.converged && diameter() < options.tolerance) result.converged = true;
    result.x = simplex[0];
    result.value = fx[0];
    result.iterations = iter;
    return result;
}

}  // namespace popcast::numerics
