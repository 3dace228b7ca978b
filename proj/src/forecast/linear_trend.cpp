#include "popcast/forecast/linear_trend.hpp"

#include <stdexcept>

namespace popcast::forecast {

void LinearTrendForecaster::fit(const TrainingSeries& train) {
    if (train.values.size() < 2) throw std::invalid_argument("lr: need at least 2 training points");
    std::vector<double> years(train.values.size());
    for (std::size_t i = 0; i < years.size(); ++i) {
        years[i] = static_cast<double>(train.start_year + static_cast<int>(i));
    }
    line_ = numerics::ols_fit(years, train.values);
    last_year_ = train.start_year + static_cast<int>(train.values.size()) - 1;
}

std::vector<double> LinearTrendForecaster::predict(std::size_t horizon) const {
    const auto& fit = line();
    std::vector<double> out(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        out[h] = fit(static_cast<double>(last_year_ + 1 + static_cast<int>(h)));
    }
    return out;
}

const numerics::LineFit& LinearTrendForecaster::line() const {
    if (!line_) throw std::logic_error("lr: predict before fit");
    return *line_;
}

}  // namespace popcast::forecast
