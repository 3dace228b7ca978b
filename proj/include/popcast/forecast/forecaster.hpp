#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace popcast::forecast {

/// Min-max normalized training window; forecasters never see raw persons.
struct TrainingSeries {
    int start_year = 0;
    std::vector<double> values;
};

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int epoch)
        : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}
    [[nodiscard]] int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

/// Fit once on a normalized training series, then forecast the years that
/// follow it. predict() is deterministic for a fitted instance.
class Forecaster {
public:
    virtual ~Forecaster() = default;

    [[nodiscard]] virtual std::string_view name() const = 0;
    virtual void fit(const TrainingSeries& train) = 0;
    /// Exactly `horizon` finite values (normalized scale).
    [[nodiscard]] virtual std::vector<double> predict(std::size_t horizon) const = 0;
    /// Short description of the fitted model, e.g. the selected ARIMA order.
    [[nodiscard]] virtual std::string describe() const { return std::string(name()); }
};

}  // namespace popcast::forecast
