// Acceptance suite: one PASS/FAIL line per criterion, with measured runtime
// against its budget. Exit status is non-zero when a criterion fails, except
// for criteria listed in kKnownUnattainable (the reason is printed).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "popcast/cli/commands.hpp"
#include "popcast/cli/results.hpp"
#include "popcast/core/series.hpp"
#include "popcast/eval/leaderboard.hpp"
#include "popcast/eval/metrics.hpp"
#include "popcast/forecast/arima.hpp"
#include "popcast/ingest/dataset.hpp"
#include "popcast/ingest/synthetic.hpp"
#include "popcast/numerics/least_squares.hpp"
#include "support/arima_oracle.hpp"
#include "support/forecaster_checks.hpp"
#include "support/oracles.hpp"
#include "support/published_tables.hpp"
#include "support/primitive_cases.hpp"
#include "support/synthetic_series.hpp"
#include "support/temp_dir.hpp"

using namespace popcast;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
};

/// Criterion 11 asks for 25 series of length 33 and 5 Hawaiian series of
/// length 23, but 30 files over 6 states x 5 groups hold one Hawaiian series
/// per state: 24 and 6. The line still evaluates the literal numbers.
const std::set<int> kKnownUnattainable = {11};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

Outcome win_rate_golden() {
    std::vector<eval::ForecastResult> results;
    for (const auto& cell : test::mse_table_cells()) {
        // One test point whose squared error is the published MSE.
        results.push_back({cell.first.first, cell.first.second, {2022}, {std::sqrt(cell.second)}, {0.0}});
    }
    const auto board = eval::build_leaderboard(results, test::kTableModels);
    const auto w = eval::win_rate(board, "TimesFM");
    const double percent = std::round(w.fraction * 10000.0) / 100.0;
    return {w.wins == 13 && w.total == 15 && percent == 86.67,
            fmt("TimesFM wins %d/%d = %.2f%%", w.wins, w.total, percent)};
}

Outcome percent_error_golden() {
    const auto a = eval::percent_error(360683, 360607);
    const auto b = eval::percent_error(388578, 394188);
    const bool pass = a.display() == "+0.02%" && b.display() == "-1.42%" && std::abs(b.value - (-1.43)) <= 0.01;
    return {pass, fmt("%s and %s (unrounded %.4f%%, printed -1.43%%)", a.display().c_str(), b.display().c_str(), b.value)};
}

Outcome split_counts() {
    const SplitSpec spec;
    const auto full = make_series({State::NY, Race::White}, 1990, std::vector<double>(33, 1000.0));
    const auto hawaiian = make_series({State::NY, Race::Hawaiian}, 2000, std::vector<double>(23, 100.0));
    const auto a = temporal_split(full, spec);
    const auto b = temporal_split(hawaiian, spec);
    const bool pass = a.train.size() == 27 && a.test.size() == 6 && b.train.size() == 17 && b.test.size() == 6;
    return {pass, fmt("1990-2022: %zu/%zu, 2000-2022: %zu/%zu", a.train.size(), a.test.size(), b.train.size(),
                      b.test.size())};
}

Outcome ols_oracle() {
    numerics::Rng rng(404);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(2 + rng.below(40)), y(x.size());
        const double slope = rng.uniform(-50, 50), intercept = rng.uniform(-1000, 1000);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.uniform(0, 50);
            y[i] = intercept + slope * x[i] + rng.uniform(-20, 20);
        }
        const auto fit = numerics::ols_fit(x, y);
        const auto [s, c] = test::normal_equations_line(x, y);
        worst = std::max({worst, std::abs(fit.slope - s) / std::max(std::abs(s), 1e-300),
                          std::abs(fit.intercept - c) / std::max(std::abs(c), 1e-300)});
    }
    return {worst <= 1e-10, fmt("max relative difference %.2e over 100 instances", worst)};
}

Outcome arima_recovery() {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = test::simulate_ar1(0.8, 500, 7000 + seed);
        total += std::abs(forecast::arima_fit(x, {1, 0, 0}).coef.ar[0] - 0.8);
    }
    const double mean_error = total / 20.0;
    int agree = 0;
    const forecast::ArimaConfig config;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::vector<double> x;
        switch (seed % 3) {
            case 0: x = test::simulate_ar1(0.7, 27, 8000 + seed); break;
            case 1: x = test::trend_plus_noise(27, 8000 + seed); break;
            default: x = test::white_noise(27, 8000 + seed); break;
        }
        const auto chosen = forecast::arima_select_order(x, config);
        const auto oracle = test::brute_force_order(x, config);
        agree += chosen.order == oracle.order && chosen.aic == oracle.aic;
    }
    return {mean_error < 0.1 && agree == 10,
            fmt("mean |phi - 0.8| = %.4f; selection matches enumeration on %d/10 series", mean_error, agree)};
}

Outcome differencing_roundtrip() {
    numerics::Rng rng(606);
    int exact = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = static_cast<int>(rng.below(3));
        std::vector<double> x(static_cast<std::size_t>(d) + 1 + rng.below(40));
        for (auto& v : x) v = static_cast<double>(static_cast<std::int64_t>(rng.below(1u << 30)) - (1 << 29)) / 1024.0;
        const auto back = forecast::undifference(forecast::difference(x, d), std::span(x).first(static_cast<std::size_t>(d)));
        exact += back == x;
    }
    return {exact == 1000, fmt("%d/1000 exact inversions", exact)};
}

Outcome gradient_checks() {
    numerics::Rng rng(707);
    double worst = 0.0;
    int checked = 0;
    std::string worst_name;
    auto record = [&](const std::string& name, const test::GradCheck& r) {
        checked += r.checked;
        if (r.max_error >= worst) worst = r.max_error, worst_name = name;
        return r.checked == 20;
    };
    bool complete = true;
    int primitives = 0;
    for (auto& c : test::primitive_cases(rng)) {
        complete = record(c.name, test::check_gradients(c.params(), c.build, rng, 20)) && complete;
        ++primitives;
    }
    complete = record("lstm", test::lstm_gradient_check(11)) && complete;
    complete = record("patch decoder", test::patch_gradient_check(12)) && complete;
    return {complete && worst < 1e-4, fmt("%d primitives + 2 forecasters, %d coordinates, max rel. error %.2e (%s)",
                                          primitives, checked, worst, worst_name.c_str())};
}

Outcome learnability() {
    const auto r = test::recurrent_ramp_learnability();
    const auto p = test::patch_ramp_learnability();
    const bool pass = r.training_mse < 1e-3 && p.training_mse < 1e-3 && p.max_relative_error < 0.05;
    return {pass, fmt("rnn train MSE %.2e; patch decoder train MSE %.2e, 6-step max rel. error %.2f%%", r.training_mse,
                      p.training_mse, 100.0 * p.max_relative_error)};
}

Outcome mask_correctness() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) worst = std::max(worst, test::mask_invariance_gap(100 + seed, 1 + seed % 3));
    return {worst <= 1e-9, fmt("max output change %.2e over 10 models", worst)};
}

Outcome end_to_end_determinism() {
    test::TempDir dir("acceptance-e2e");
    ingest::write_fixture(ingest::make_fixture({}), dir / "raw");
    std::ostringstream out, err;
    if (cli::cmd_ingest({dir / "raw" / "fred", dir / "raw" / "census.csv", dir / "data"}, out, err) != cli::kExitOk) {
        return {false, "ingest failed: " + err.str()};
    }
    cli::RunConfig config;  // all four models, default hyperparameters
    config.dataset = (dir / "data" / "dataset.json").string();
    config.seed = 2024;
    double slowest = 0.0;
    for (const char* name : {"first", "second"}) {
        const auto start = std::chrono::steady_clock::now();
        if (cli::cmd_run(config, dir / name, std::max(1u, std::thread::hardware_concurrency()), out, err) != cli::kExitOk) return {false, "run failed: " + err.str()};
        slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    const auto a = test::slurp(dir / "first" / "results.json");
    const auto b = test::slurp(dir / "second" / "results.json");
    const auto results = cli::parse_results(a);
    std::size_t ok = 0;
    for (const auto& c : results.cells) ok += c.ok;
    const bool pass = a == b && results.cells.size() == 120 && slowest < 600.0;
    return {pass, fmt("%zu cells (%zu ok), %zu bytes, identical=%s, slowest run %.0f s", results.cells.size(), ok,
                      a.size(), a == b ? "yes" : "no", slowest)};
}

Outcome ingest_fixture() {
    test::TempDir dir("acceptance-ingest");
    const auto fixture = ingest::make_fixture({});
    ingest::write_fixture(fixture, dir.path());
    std::size_t data_files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "fred")) data_files += e.path().filename() != "manifest.csv";
    const auto dataset = ingest::build_dataset(dir / "fred", dir / "census.csv");
    int long_series = 0, short_hawaiian = 0, other = 0;
    bool hawaiian_pre_2000 = false;
    for (const auto& [key, series] : dataset.series) {
        if (key.race == Race::Hawaiian) {
            hawaiian_pre_2000 = hawaiian_pre_2000 || series.start_year() < 2000;
            (series.size() == 23 && series.end_year() == 2022) ? ++short_hawaiian : ++other;
        } else {
            (series.size() == 33 && series.start_year() == 1990) ? ++long_series : ++other;
        }
    }
    // The raw Hawaiian files do carry 1995-1999 values, so absence is the deletion rule at work.
    bool raw_has_early = false;
    for (const auto& [name, text] : fixture.fred_files) {
        if (name.find("Hawaiian") != std::string::npos) raw_has_early = raw_has_early || text.find("1995-01-01,") != std::string::npos;
    }
    const auto json = ingest::serialize_dataset(dataset);
    const auto reparsed = ingest::parse_dataset_json(json);
    bool json_absent = true;
    for (const auto& [key, series] : reparsed.series) json_absent = json_absent && (key.race != Race::Hawaiian || series.start_year() == 2000);

    const bool attainable = data_files == 30 && other == 0 && long_series + short_hawaiian == 30 && !hawaiian_pre_2000 &&
                            raw_has_early && json_absent;
    const bool literal = attainable && long_series == 25 && short_hawaiian == 5;
    return {literal, fmt("%zu files -> %d series of length 33, %d Hawaiian of length 23 (criterion states 25/5); "
                         "Hawaiian pre-2000 rows in raw files: %s, in dataset: %s; other checks %s",
                         data_files, long_series, short_hawaiian, raw_has_early ? "yes" : "no",
                         hawaiian_pre_2000 || !json_absent ? "present" : "absent", attainable ? "pass" : "FAIL")};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "win-rate golden test", 1, win_rate_golden},
        {2, "percent-error golden test", 1, percent_error_golden},
        {3, "split counts", 1, split_counts},
        {4, "OLS oracle equivalence", 1, ols_oracle},
        {5, "ARIMA recovery and order-selection oracle", 30, arima_recovery},
        {6, "differencing roundtrip", 1, differencing_roundtrip},
        {7, "gradient checks", 30, gradient_checks},
        {8, "learnability", 300, learnability},
        {9, "mask correctness", 10, mask_correctness},
        {10, "end-to-end determinism", 1200, end_to_end_determinism},
        {11, "ingest fixture", 5, ingest_fixture},
    };
    int failures = 0, passes = 0, tolerated = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = seconds < c.budget_seconds;
        const bool pass = o.pass && in_budget;
        std::printf("%s [%2d] %s: %s; %.2f s (budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), seconds, c.budget_seconds);
        std::fflush(stdout);
        if (pass) {
            ++passes;
        } else if (kKnownUnattainable.contains(c.id)) {
            ++tolerated;
            std::printf("     [%2d] known unattainable: 6 states x 5 groups yield 6 Hawaiian series, not 5\n", c.id);
        } else {
            ++failures;
        }
    }
    std::printf("%d/%zu criteria passed, %d failed, %d known unattainable\n", passes, criteria.size(), failures, tolerated);
    return failures == 0 ? 0 : 1;
}
