#pragma once

#include <compare>
#include <optional>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "popcast/forecast/config.hpp"
#include "popcast/forecast/forecaster.hpp"

namespace popcast::forecast {

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    auto operator<=>(const ArimaOrder&) const = default;
    [[nodiscard]] std::string to_string() const;
};

/// w_t = intercept + sum ar[i] w_{t-1-i} + sum ma[j] e_{t-1-j} + e_t on the differenced series.
struct ArimaCoefficients {
    std::vector<double> ar;
    std::vector<double> ma;
    double intercept = 0.0;
};

/// Applies the first difference d times. Throws if d < 0 or d > |values| - 1.
std::vector<double> difference(std::span<const double> values, int d);

/// Inverts difference() given the first d values of the original series.
std::vector<double> undifference(std::span<const double> diffed, std::span<const double> seeds);

/// One-step residuals with pre-sample residuals at zero; the first max(p, q)
/// points are burn-in and keep residual 0.
std::vector<double> arima_residuals(const ArimaCoefficients& coef, std::span<const double> differenced);

/// Conditional sum of squares over the residuals after burn-in.
/// Throws std::invalid_argument when |differenced| <= p + q.
double arima_css(const ArimaCoefficients& coef, std::span<const double> differenced);

/// True when the AR polynomial is stationary and the MA polynomial invertible
/// (all roots strictly outside the unit circle).
bool arima_admissible(const ArimaCoefficients& coef);

/// Added to the CSS of inadmissible parameter vectors during fitting.
inline constexpr double kInadmissiblePenalty = 1e6;

struct ArimaModel {
    ArimaOrder order;
    ArimaCoefficients coef;
    double sigma2 = 0.0;
    std::size_t n_effective = 0;
    std::vector<double> differenced;
    std::vector<double> residuals;
    /// Last value of the series at difference levels 0..d-1, used to integrate forecasts.
    std::vector<double> level_tails;
};

/// Assembles a model from known coefficients and the (undifferenced) training series.
ArimaModel make_arima_model(ArimaOrder order, ArimaCoefficients coef, std::span<const double> series);

/// CSS estimate via the simplex minimizer started at zero coefficients and the
/// mean of the differenced series. Requires |series| > p + q + d + 2.
ArimaModel arima_fit(std::span<const double> series, ArimaOrder order, const ArimaConfig& config = {});

/// n_eff * ln(sigma2) + 2 (p + q + 1)
double arima_aic(const ArimaModel& model);

struct OrderSelection {
    ArimaOrder order;
    double aic = 0.0;
    ArimaModel model;
    std::size_t candidates = 0;
};

/// Exhaustive AIC search over the config bounds. Ties go to the smaller
/// p + d + q, then to the lexicographically smaller (p, d, q). Orders the
/// series is too short for are skipped; throws if none remain.
OrderSelection arima_select_order(std::span<const double> series, const ArimaConfig& config);

/// Recursive forecast with future shocks at zero, integrated back to the series scale.
std::vector<double> arima_forecast(const ArimaModel& model, std::size_t horizon);

class ArimaForecaster final : public Forecaster {
public:
    explicit ArimaForecaster(ArimaConfig config = {}) : config_(config) { config_.validate(); }

    [[nodiscard]] std::string_view name() const override { return "arima"; }
    void fit(const TrainingSeries& train) override;
    [[nodiscard]] std::vector<double> predict(std::size_t horizon) const override;
    [[nodiscard]] std::string describe() const override;

    [[nodiscard]] const ArimaModel& model() const;

private:
    ArimaConfig config_;
    std::optional<ArimaModel> model_;
};

}  // namespace popcast::forecast
