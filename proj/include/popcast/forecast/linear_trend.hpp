#pragma once

#include <optional>

#include "popcast/forecast/forecaster.hpp"
#include "popcast/numerics/least_squares.hpp"

namespace popcast::forecast {

/// Least-squares line on calendar year, extrapolated.
class LinearTrendForecaster final : public Forecaster {
public:
    [[nodiscard]] std::string_view name() const override { return "lr"; }
    void fit(const TrainingSeries& train) override;
    [[nodiscard]] std::vector<double> predict(std::size_t horizon) const override;

    [[nodiscard]] const numerics::LineFit& line() const;

private:
    std::optional<numerics::LineFit> line_;
    int last_year_ = 0;
};

}  // namespace popcast::forecast
