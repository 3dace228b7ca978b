#include "popcast/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <thread>

#include "popcast/core/normalize.hpp"
#include "popcast/forecast/arima.hpp"
#include "popcast/forecast/linear_trend.hpp"
#include "popcast/forecast/patch_decoder.hpp"
#include "popcast/forecast/recurrent.hpp"
#include "popcast/numerics/random.hpp"

namespace popcast::cli {

namespace {

/// Train/test split and normalized training values of one series.
struct Prepared {
    SeriesKey key;
    std::optional<TrainTestSplit> split;
    NormParams norm;
    std::vector<double> train;
    std::string error;
};

Prepared prepare(const AnnualSeries& series, const SplitSpec& spec) {
    Prepared p{series.key(), std::nullopt, {}, {}, {}};
    try {
        p.split = temporal_split(series, spec);
        p.norm = minmax_fit(p.split->train);
        p.train = minmax_apply(p.norm, p.split->train.values());
    } catch (const std::exception& e) {
        p.split.reset();
        p.error = e.what();
    }
    return p;
}

void forecast_cell(const Prepared& p, forecast::Forecaster& model, CellResult& cell) {
    if (!p.split) throw std::runtime_error(p.error);
    model.fit({p.split->train.start_year(), p.train});
    const auto& test = p.split->test;
    const auto predicted = minmax_invert(p.norm, model.predict(test.size()));
    if (!std::all_of(predicted.begin(), predicted.end(), [](double v) { return std::isfinite(v); })) {
        throw std::runtime_error(std::string(model.name()) + ": non-finite forecast");
    }
    cell.years = test.years();
    cell.predicted = predicted;
    cell.actual.assign(test.values().begin(), test.values().end());
    cell.detail = model.describe();
    cell.ok = true;
}

void fail(CellResult& cell, const std::string& error) {
    cell.ok = false;
    cell.error = error;
    cell.detail.clear();
    cell.years.clear();
    cell.predicted.clear();
    cell.actual.clear();
}

void run_guarded(CellResult& cell, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        fail(cell, e.what());
    }
}

std::unique_ptr<forecast::Forecaster> make_single(const RunConfig& config, const std::string& model,
                                                  const SeriesKey& key) {
    if (model == "lr") return std::make_unique<forecast::LinearTrendForecaster>();
    if (model == "arima") return std::make_unique<forecast::ArimaForecaster>(config.arima);
    return std::make_unique<forecast::RecurrentForecaster>(
        config.rnn, numerics::derive_seed(config.seed, key.label() + "|" + model));
}

void run_tasks(std::vector<std::function<void()>>& tasks, unsigned threads) {
    const auto workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, tasks.size()));
    if (workers == 1) {
        for (auto& t : tasks) t();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < tasks.size(); i = next++) tasks[i]();
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

RunResults execute_run(const RunConfig& config, const ingest::Dataset& dataset, unsigned threads) {
    config.validate();
    RunResults results;
    results.seed = config.seed;
    results.config = to_flat(config);
    results.models = config.models;

    std::vector<Prepared> prepared;
    for (const auto& [key, series] : dataset.series) prepared.push_back(prepare(series, config.split));

    const std::size_t model_count = config.models.size();
    results.cells.resize(prepared.size() * model_count);
    for (std::size_t k = 0; k < prepared.size(); ++k) {
        for (std::size_t m = 0; m < model_count; ++m) {
            auto& cell = results.cells[k * model_count + m];
            cell.key = prepared[k].key;
            cell.model = config.models[m];
        }
    }

    // Slowest work first so a thread pool finishes evenly.
    std::vector<std::function<void()>> heavy;
    std::vector<std::function<void()>> light;
    for (std::size_t m = 0; m < model_count; ++m) {
        const std::string& model = config.models[m];
        if (model == "patchtf") {
            for (const State state : kAllStates) {
                std::vector<std::size_t> members;
                for (std::size_t k = 0; k < prepared.size(); ++k) {
                    if (prepared[k].key.state == state) members.push_back(k);
                }
                if (members.empty()) continue;
                heavy.emplace_back([&, members, m, state] {
                    std::vector<std::vector<double>> training;
                    for (const auto k : members) {
                        if (prepared[k].split) training.push_back(prepared[k].train);
                    }
                    std::shared_ptr<forecast::PatchDecoder> decoder;
                    std::string error;
                    try {
                        decoder = std::make_shared<forecast::PatchDecoder>(
                            config.patchtf,
                            numerics::derive_seed(config.seed, std::string(to_string(state)) + "|patchtf"));
                        decoder->fit(training);
                    } catch (const std::exception& e) {
                        error = e.what();
                    }
                    for (const auto k : members) {
                        auto& cell = results.cells[k * model_count + m];
                        if (!error.empty()) {
                            fail(cell, prepared[k].split ? error : prepared[k].error);
                            continue;
                        }
                        run_guarded(cell, [&] {
                            forecast::PatchDecoderForecaster f(decoder);
                            forecast_cell(prepared[k], f, cell);
                        });
                    }
                });
            }
            continue;
        }
        for (std::size_t k = 0; k < prepared.size(); ++k) {
            auto task = [&, k, m] {
                auto& cell = results.cells[k * model_count + m];
                run_guarded(cell, [&] {
                    auto f = make_single(config, config.models[m], prepared[k].key);
                    forecast_cell(prepared[k], *f, cell);
                });
            };
            (model == "rnn" ? heavy : light).emplace_back(std::move(task));
        }
    }
    heavy.insert(heavy.end(), light.begin(), light.end());
    run_tasks(heavy, threads);
    return results;
}

}  // namespace popcast::cli
