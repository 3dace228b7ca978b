#include "popcast/forecast/arima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "popcast/numerics/nelder_mead.hpp"

namespace popcast::forecast {

namespace {

/// Schur-Cohn step-down: 1 - a1 z - ... - ak z^k has all roots outside the
/// unit circle iff every reflection coefficient has magnitude below 1.
bool roots_outside_unit_circle(std::vector<double> a) {
    while (!a.empty()) {
        const double r = a.back();
        if (!(std::abs(r) < 1.0)) return false;
        const std::size_t k = a.size();
        std::vector<double> lower(k - 1);
        for (std::size_t i = 0; i + 1 < k; ++i) {
            lower[i] = (a[i] + r * a[k - 2 - i]) / (1.0 - r * r);
        }
        a = std::move(lower);
    }
    return true;
}

ArimaCoefficients unpack(std::span<const double> x, int p, int q) {
    ArimaCoefficients c;
    c.ar.assign(x.begin(), x.begin() + p);
    c.ma.assign(x.begin() + p, x.begin() + p + q);
    c.intercept = x[static_cast<std::size_t>(p + q)];
    return c;
}

}  // namespace

std::string ArimaOrder::to_string() const {
    return "ARIMA(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
}

std::vector<double> difference(std::span<const double> values, int d) {
    if (d < 0) throw std::invalid_argument("difference: d must be >= 0");
    if (values.empty() || static_cast<std::size_t>(d) > values.size() - 1) {
        throw std::invalid_argument("difference: d = " + std::to_string(d) + " too large for " +
                                    std::to_string(values.size()) + " values");
    }
    std::vector<double> out(values.begin(), values.end());
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
        out.pop_back();
    }
    return out;
}

std::vector<double> undifference(std::span<const double> diffed, std::span<const double> seeds) {
    const std::size_t d = seeds.size();
    if (d == 0) return {diffed.begin(), diffed.end()};
    // First value of each difference level 0..d-1, from the seed prefix.
    std::vector<double> heads(d);
    std::vector<double> level(seeds.begin(), seeds.end());
    for (std::size_t k = 0; k < d; ++k) {
        heads[k] = level.front();
        for (std::size_t i = 0; i + 1 < level.size(); ++i) level[i] = level[i + 1] - level[i];
        level.pop_back();
    }
    std::vector<double> current(diffed.begin(), diffed.end());
    for (std::size_t k = d; k-- > 0;) {
        std::vector<double> up(current.size() + 1);
        up[0] = heads[k];
        for (std::size_t i = 0; i < current.size(); ++i) up[i + 1] = up[i] + current[i];
        current = std::move(up);
    }
    return current;
}

std::vector<double> arima_residuals(const ArimaCoefficients& coef, std::span<const double> w) {
    const std::size_t p = coef.ar.size();
    const std::size_t q = coef.ma.size();
    if (w.size() <= p + q) {
        throw std::invalid_argument("arima_css: " + std::to_string(w.size()) +
                                    " points are too few for p + q = " + std::to_string(p + q));
    }
    const std::size_t burn_in = std::max(p, q);
    std::vector<double> e(w.size(), 0.0);
    for (std::size_t t = burn_in; t < w.size(); ++t) {
        double pred = coef.intercept;
        for (std::size_t i = 0; i < p; ++i) pred += coef.ar[i] * w[t - 1 - i];
        for (std::size_t j = 0; j < q; ++j) pred += coef.ma[j] * e[t - 1 - j];
        e[t] = w[t] - pred;
    }
    return e;
}

double arima_css(const ArimaCoefficients& coef, std::span<const double> w) {
    const auto e = arima_residuals(coef, w);
    const std::size_t burn_in = std::max(coef.ar.size(), coef.ma.size());
    double sum = 0.0;
    for (std::size_t t = burn_in; t < e.size(); ++t) sum += e[t] * e[t];
    return sum;
}

bool arima_admissible(const ArimaCoefficients& coef) {
    std::vector<double> neg_ma(coef.ma.size());
    std::transform(coef.ma.begin(), coef.ma.end(), neg_ma.begin(), std::negate<>());
    return roots_outside_unit_circle(coef.ar) && roots_outside_unit_circle(std::move(neg_ma));
}

ArimaModel make_arima_model(ArimaOrder order, ArimaCoefficients coef, std::span<const double> series) {
    if (order.p < 0 || order.d < 0 || order.q < 0) throw std::invalid_argument("arima: negative order");
    if (coef.ar.size() != static_cast<std::size_t>(order.p) ||
        coef.ma.size() != static_cast<std::size_t>(order.q)) {
        throw std::invalid_argument("arima: coefficient counts do not match " + order.to_string());
    }
    ArimaModel model;
    model.order = order;
    model.differenced = difference(series, order.d);
    model.residuals = arima_residuals(coef, model.differenced);
    const std::size_t burn_in = static_cast<std::size_t>(std::max(order.p, order.q));
    model.n_effective = model.differenced.size() - burn_in;
    double css = 0.0;
    for (std::size_t t = burn_in; t < model.residuals.size(); ++t) {
        css += model.residuals[t] * model.residuals[t];
    }
    model.sigma2 = css / static_cast<double>(model.n_effective);
    for (int k = 0; k < order.d; ++k) model.level_tails.push_back(difference(series, k).back());
    model.coef = std::move(coef);
    return model;
}

ArimaModel arima_fit(std::span<const double> series, ArimaOrder order, const ArimaConfig& config) {
    if (order.p < 0 || order.d < 0 || order.q < 0) throw std::invalid_argument("arima: negative order");
    const auto needed = static_cast<std::size_t>(order.p + order.q + order.d + 2);
    if (series.size() <= needed) {
        throw std::invalid_argument("arima: " + std::to_string(series.size()) +
                                    " points are too few for " + order.to_string());
    }
    const auto w = difference(series, order.d);
    const int p = order.p;
    const int q = order.q;

    std::vector<double> x0(static_cast<std::size_t>(p + q + 1), 0.0);
    x0.back() = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());

    const numerics::Objective objective = [&](std::span<const double> x) {
        const auto coef = unpack(x, p, q);
        const double css = arima_css(coef, w);
        return arima_admissible(coef) ? css : css + kInadmissiblePenalty;
    };
    numerics::NelderMeadOptions options;
    options.max_iters = config.max_iters;
    options.tolerance = config.tolerance;
    auto best = numerics::nelder_mead(objective, x0, options);
    // A restart from the first optimum rebuilds a fresh simplex, which guards
    // against premature collapse.
    best = numerics::nelder_mead(objective, best.x, options);
    if (!std::isfinite(best.value)) {
        throw std::runtime_error("arima: non-finite objective while fitting " + order.to_string());
    }
    return make_arima_model(order, unpack(best.x, p, q), series);
}

double arima_aic(const ArimaModel& model) {
    const double sigma2 = std::max(model.sigma2, std::numeric_limits<double>::min());
    const int k = model.order.p + model.order.q + 1;
    return static_cast<double>(model.n_effective) * std::log(sigma2) + 2.0 * k;
}

OrderSelection arima_select_order(std::span<const double> series, const ArimaConfig& config) {
    config.validate();
    std::optional<OrderSelection> best;
    std::size_t candidates = 0;
    auto better = [](double aic, ArimaOrder o, const OrderSelection& cur) {
        if (aic != cur.aic) return aic < cur.aic;
        const int c1 = o.p + o.d + o.q;
        const int c2 = cur.order.p + cur.order.d + cur.order.q;
        if (c1 != c2) return c1 < c2;
        return o < cur.order;
    };
    for (int p = 0; p <= config.max_p; ++p) {
        for (int d = 0; d <= config.max_d; ++d) {
            for (int q = 0; q <= config.max_q; ++q) {
                const ArimaOrder order{p, d, q};
                if (series.size() <= static_cast<std::size_t>(p + q + d + 2)) continue;
                auto model = arima_fit(series, order, config);
                ++candidates;
                const double aic = arima_aic(model);
                if (!best || better(aic, order, *best)) {
                    best = OrderSelection{order, aic, std::move(model), 0};
                }
            }
        }
    }
    if (!best) {
        throw std::invalid_argument("arima: series of " + std::to_string(series.size()) +
                                    " points is too short for every candidate order");
    }
    best->candidates = candidates;
    return std::move(*best);
}

std::vector<double> arima_forecast(const ArimaModel& model, std::size_t horizon) {
    const auto& c = model.coef;
    std::vector<double> w = model.differenced;
    std::vector<double> e = model.residuals;
    const std::size_t n = w.size();
    for (std::size_t k = 0; k < horizon; ++k) {
        const std::size_t t = n + k;
        double pred = c.intercept;
        for (std::size_t i = 0; i < c.ar.size(); ++i) pred += c.ar[i] * w[t - 1 - i];
        for (std::size_t j = 0; j < c.ma.size(); ++j) pred += c.ma[j] * e[t - 1 - j];
        w.push_back(pred);
        e.push_back(0.0);
    }
    std::vector<double> out(w.begin() + static_cast<std::ptrdiff_t>(n), w.end());
    for (std::size_t level = model.level_tails.size(); level-- > 0;) {
        double running = model.level_tails[level];
        for (double& v : out) {
            running += v;
            v = running;
        }
    }
    return out;
}

void ArimaForecaster::fit(const TrainingSeries& train) {
    auto selection = arima_select_order(train.values, config_);
    model_ = std::move(selection.model);
}

std::vector<double> ArimaForecaster::predict(std::size_t horizon) const {
    return arima_forecast(model(), horizon);
}

std::string ArimaForecaster::describe() const {
    return model_ ? model_->order.to_string() : "arima (unfitted)";
}

const ArimaModel& ArimaForecaster::model() const {
    if (!model_) throw std::logic_error("arima: predict before fit");
    return *model_;
}

}  // namespace popcast::forecast
