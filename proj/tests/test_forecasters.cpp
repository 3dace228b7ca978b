#include <doctest.h>

#include <cmath>

#include "popcast/forecast/linear_trend.hpp"
#include "popcast/forecast/patch_decoder.hpp"
#include "popcast/forecast/recurrent.hpp"
#include "popcast/numerics/least_squares.hpp"
#include "support/forecaster_checks.hpp"
#include "support/oracles.hpp"

using namespace popcast::forecast;
using popcast::numerics::Rng;

TEST_CASE("linear trend extrapolates an exact line") {
    std::vector<double> y;
    for (int year = 1990; year <= 2016; ++year) y.push_back(0.01 * (year - 1990));
    LinearTrendForecaster f;
    f.fit({1990, y});
    const auto out = f.predict(2);
    CHECK(out[0] == doctest::Approx(0.27).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.28).epsilon(1e-12));

    LinearTrendForecaster flat;
    flat.fit({2000, {0.4, 0.4, 0.4}});
    CHECK(flat.predict(3) == std::vector<double>{0.4, 0.4, 0.4});
}

TEST_CASE("linear trend on noisy data matches the OLS line at the test years") {
    Rng rng(4);
    std::vector<double> years, y;
    for (int i = 0; i < 27; ++i) {
        years.push_back(1990 + i);
        y.push_back(0.3 + 0.02 * i + rng.uniform(-0.05, 0.05));
    }
    LinearTrendForecaster f;
    f.fit({1990, y});
    const auto [slope, intercept] = popcast::test::normal_equations_line(years, y);
    const auto out = f.predict(6);
    for (int k = 0; k < 6; ++k) CHECK(std::abs(out[k] - (intercept + slope * (2017 + k))) < 1e-12);
}

TEST_CASE("linear trend errors") {
    LinearTrendForecaster f;
    CHECK_THROWS_AS((void)f.predict(1), std::logic_error);
    CHECK_THROWS_AS(f.fit({1990, {0.5}}), std::invalid_argument);
}

TEST_CASE("make_windows count and alignment") {
    const std::vector<double> s{0, 1, 2, 3, 4, 5, 6, 7};
    const auto w = make_windows(s, 5);
    REQUIRE(w.size() == 3);
    CHECK(w[0].input == std::vector<double>{0, 1, 2, 3, 4});
    CHECK(w[0].target == 5);
    CHECK(w[2].target == 7);
    CHECK(make_windows(std::vector<double>{0, 1, 2, 3, 4, 5}, 5).size() == 1);
    CHECK_THROWS_AS(make_windows(std::vector<double>{0, 1, 2, 3, 4}, 5), std::invalid_argument);
    for (std::size_t n = 6; n < 30; ++n) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
        const auto ws = make_windows(x, 5);
        CHECK(ws.size() == n - 5);
        for (std::size_t i = 0; i < ws.size(); ++i) {
            CHECK(ws[i].input.front() == static_cast<double>(i));
            CHECK(ws[i].target == static_cast<double>(i + 5));
        }
    }
}

TEST_CASE("LSTM gradients match finite differences") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto r = popcast::test::lstm_gradient_check(seed);
        CHECK(r.checked == 20);
        CHECK(r.max_error < 1e-4);
    }
}

TEST_CASE("recurrent forecaster contracts") {
    auto config = popcast::test::small_recurrent_config();
    config.epochs = 20;
    const std::vector<double> train{0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.55, 0.6, 0.7, 0.8};
    RecurrentForecaster a(config, 7), b(config, 7), c(config, 8);
    CHECK_THROWS_AS((void)a.predict(1), std::logic_error);
    a.fit({1990, train});
    b.fit({1990, train});
    c.fit({1990, train});
    const auto fa = a.predict(6);
    CHECK(fa.size() == 6);
    for (double v : fa) CHECK(std::isfinite(v));
    CHECK(fa == b.predict(6));
    CHECK(fa != c.predict(6));
    CHECK(a.predict(0).empty());
    CHECK(a.loss_history().size() == 20);
    CHECK_THROWS_AS(a.fit({1990, {0.1, 0.2, 0.3, 0.4}}), std::invalid_argument);
}

TEST_CASE("recurrent forecaster learns a ramp") {
    const auto r = popcast::test::recurrent_ramp_learnability();
    CHECK(r.training_mse < 1e-3);
}

TEST_CASE("patchify shapes and padding") {
    std::vector<double> v64(64, 1.0);
    const auto a = patchify(v64, 16);
    CHECK(a.count() == 4);
    for (double m : a.mask.data()) CHECK(m == 1.0);

    std::vector<double> v10(10);
    for (std::size_t i = 0; i < 10; ++i) v10[i] = static_cast<double>(i + 1);
    const auto b = patchify(v10, 16);
    CHECK(b.count() == 1);
    for (std::size_t i = 0; i < 6; ++i) CHECK(b.mask[i] == 0.0);
    for (std::size_t i = 0; i < 6; ++i) CHECK(b.values[i] == 0.0);
    CHECK(b.values[6] == 1.0);
    CHECK(b.values[15] == 10.0);

    const auto c = patchify(std::vector<double>(17, 2.0), 16);
    CHECK(c.count() == 2);
    int padded = 0;
    for (double m : c.mask.data()) padded += m == 0.0;
    CHECK(padded == 15);
    CHECK(c.patch_valid(0));

    CHECK_THROWS_AS(patchify(std::vector<double>{}, 16), std::invalid_argument);
    CHECK_THROWS_AS(patchify(v10, 0), std::invalid_argument);
    const auto d = prepend_padding(b, 2);
    CHECK(d.count() == 3);
    CHECK_FALSE(d.patch_valid(0));
    CHECK_FALSE(d.patch_valid(1));
    CHECK(d.patch_valid(2));
}

TEST_CASE("patch decoder output width and errors") {
    PatchDecoderConfig config;
    const PatchDecoder model(config, 3);
    for (std::size_t n : {5u, 16u, 40u, 64u}) {
        std::vector<double> context(n, 0.5);
        CHECK(model.forward_values(patchify(context, 16)).size() == 128);
    }
    CHECK(model.predict(std::vector<double>(30, 0.2), 12).size() == 12);
    Patches empty = prepend_padding(patchify(std::vector<double>{1.0}, 16), 1);
    empty.mask.fill(0.0);
    CHECK_THROWS_AS((void)model.forward_values(empty), std::invalid_argument);
    CHECK_THROWS_AS((void)model.predict(std::vector<double>{}, 3), std::invalid_argument);
}

TEST_CASE("patch decoder gradients match finite differences") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto r = popcast::test::patch_gradient_check(seed);
        CHECK(r.checked == 20);
        CHECK(r.max_error < 1e-4);
    }
}

TEST_CASE("masked padding patches do not change the output") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CHECK(popcast::test::mask_invariance_gap(seed, 1 + seed % 3) <= 1e-9);
    }
}

TEST_CASE("training examples cover every split point") {
    PatchDecoderConfig config;
    config.context_length = 4;
    config.horizon = 3;
    const std::vector<std::vector<double>> set{{0, 1, 2, 3, 4, 5, 6}, {10, 11}};
    const auto ex = make_training_examples(set, config);
    REQUIRE(ex.size() == 7);
    CHECK(ex[0].context == std::vector<double>{0});
    CHECK(ex[0].target == std::vector<double>{1, 2, 3});
    CHECK(ex[5].context == std::vector<double>{2, 3, 4, 5});
    CHECK(ex[5].target == std::vector<double>{6});
    CHECK(ex[6].context == std::vector<double>{10});
    CHECK(ex[6].target == std::vector<double>{11});
}

TEST_CASE("patch decoder fit is deterministic and validates input") {
    auto config = popcast::test::small_patch_config();
    config.epochs = 5;
    const std::vector<std::vector<double>> set{{0.1, 0.3, 0.2, 0.5, 0.6, 0.55, 0.8, 0.9}};
    PatchDecoder a(config, 5), b(config, 5), c(config, 6);
    a.fit(set);
    b.fit(set);
    c.fit(set);
    const auto fa = a.predict(set[0], 4);
    CHECK(fa == b.predict(set[0], 4));
    CHECK(fa != c.predict(set[0], 4));
    CHECK(a.loss_history().size() == 5);
    const std::vector<std::vector<double>> short_set{{0.1}};
    CHECK_THROWS_AS(a.fit(short_set), std::invalid_argument);
    CHECK_THROWS_AS(a.fit(std::span<const std::vector<double>>{}), std::invalid_argument);
    CHECK_THROWS_AS((void)a.predict(set[0], 5), std::invalid_argument);
}

TEST_CASE("patch decoder forecaster adapters") {
    auto config = popcast::test::small_patch_config();
    config.epochs = 3;
    const TrainingSeries train{1990, {0.1, 0.3, 0.2, 0.5, 0.6, 0.55, 0.8, 0.9}};
    PatchDecoderForecaster own(config, 9);
    CHECK_THROWS_AS((void)own.predict(2), std::logic_error);
    own.fit(train);
    const auto out = own.predict(4);
    CHECK(out.size() == 4);
    for (double v : out) CHECK(std::isfinite(v));

    auto shared = std::make_shared<PatchDecoder>(config, 9);
    const std::vector<std::vector<double>> set{train.values};
    shared->fit(set);
    PatchDecoderForecaster wrapped(shared);
    wrapped.fit(train);
    CHECK(wrapped.predict(4) == out);
}

TEST_CASE("patch decoder learns a ramp") {
    const auto r = popcast::test::patch_ramp_learnability();
    CHECK(r.training_mse < 1e-3);
    CHECK(r.max_relative_error < 0.05);
}
