#pragma once

#include "popcast/cli/results.hpp"
#include "popcast/cli/run_config.hpp"
#include "popcast/ingest/dataset.hpp"

namespace popcast::cli {

/// Splits, normalizes, fits and forecasts every (series, model) cell. A cell
/// that fails records its error instead of aborting the run. Per-cell seeds
/// come from (config.seed, series key, model), and each patch-decoder model is
/// shared by the series of one state, so the output does not depend on
/// `threads`. Throws ConfigError for an invalid config.
RunResults execute_run(const RunConfig& config, const ingest::Dataset& dataset, unsigned threads = 1);

}  // namespace popcast::cli
