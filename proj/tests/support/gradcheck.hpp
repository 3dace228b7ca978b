#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "popcast/numerics/graph.hpp"
#include "popcast/numerics/random.hpp"

namespace popcast::test {

using LossBuilder = std::function<numerics::Graph::Var(numerics::Graph&)>;

struct GradCheck {
    int checked = 0;
    double max_error = 0.0;
};

/// |a - n| relative to the larger magnitude; gradients below 1e-6 are compared
/// against 1e-6 instead, where finite differences stop resolving.
inline double grad_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

/// Compares backward() against central differences (step h) at `coords`
/// coordinates drawn uniformly over all entries of `params`.
inline GradCheck check_gradients(const std::vector<numerics::Parameter*>& params, const LossBuilder& build,
                                 numerics::Rng& rng, int coords = 20, double h = 1e-5) {
    for (auto* p : params) p->zero_grad();
    {
        numerics::Graph g;
        g.backward(build(g));
    }
    std::vector<std::pair<numerics::Parameter*, std::size_t>> all;
    for (auto* p : params) {
        for (std::size_t i = 0; i < p->value.size(); ++i) all.emplace_back(p, i);
    }
    auto loss_at = [&] {
        numerics::Graph g;
        return g.value(build(g))[0];
    };
    GradCheck out;
    for (int k = 0; k < coords; ++k) {
        const auto [p, i] = all[rng.below(all.size())];
        const double saved = p->value[i];
        p->value[i] = saved + h;
        const double up = loss_at();
        p->value[i] = saved - h;
        const double down = loss_at();
        p->value[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        out.max_error = std::max(out.max_error, grad_error(p->grad[i], numeric));
        ++out.checked;
    }
    return out;
}

inline numerics::Tensor random_tensor(std::vector<std::size_t> shape, numerics::Rng& rng, double lo = -1.0,
                                      double hi = 1.0) {
    numerics::Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

}  // namespace popcast::test
