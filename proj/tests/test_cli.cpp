#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <regex>

#include "popcast/cli/commands.hpp"
#include "popcast/cli/report.hpp"
#include "popcast/cli/results.hpp"
#include "popcast/cli/run_config.hpp"
#include "popcast/cli/runner.hpp"
#include "popcast/cli/svg_chart.hpp"
#include "popcast/ingest/dataset.hpp"
#include "support/cli_harness.hpp"
#include "support/temp_dir.hpp"

using namespace popcast;
using namespace popcast::cli;
using popcast::test::invoke_cli;
using popcast::test::slurp;
using popcast::test::spit;
using popcast::test::TempDir;

namespace {

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

CellResult ok_cell(SeriesKey key, std::string model, std::vector<double> predicted) {
    CellResult c;
    c.key = key;
    c.model = std::move(model);
    c.ok = true;
    c.detail = c.model;
    c.years = {2021, 2022};
    c.predicted = std::move(predicted);
    c.actual = {1000.0, 1100.0};
    return c;
}

RunResults two_by_two() {
    RunResults r;
    r.seed = 3;
    r.config = to_flat(RunConfig{});
    r.models = {"lr", "arima"};
    const SeriesKey a{State::AL, Race::Asian}, b{State::TX, Race::Black};
    r.cells = {ok_cell(a, "lr", {1010, 1090}), ok_cell(a, "arima", {1200, 1300}),
               ok_cell(b, "lr", {900, 800}), ok_cell(b, "arima", {1001, 1101})};
    return r;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_CASE("config flat text round trip") {
    RunConfig c;
    c.dataset = "data/dataset.json";
    c.models = {"rnn", "lr"};
    c.seed = 18446744073709551615ULL;
    c.rnn.learning_rate = 0.0025;
    c.patchtf.epochs = 7;
    c.split = SplitSpec::validation();
    const auto text = serialize_flat_config(to_flat(c));
    CHECK(from_flat(parse_flat_config(text)) == c);
    CHECK(text.find("rnn.learning_rate = 0.0025") != std::string::npos);

    const auto flat = parse_flat_config("# comment\nrun.seed = 9\n\n  arima.max_p=2  \n");
    CHECK(flat.at("run.seed") == "9");
    CHECK(flat.at("arima.max_p") == "2");
    CHECK_THROWS_AS(parse_flat_config("run.seed = 1\nrun.seed = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_flat_config("no equals sign\n"), ConfigError);
    RunConfig d;
    CHECK_THROWS_AS(apply_setting(d, "rnn.colour", "red"), ConfigError);
    CHECK_THROWS_AS(apply_setting(d, "rnn.epochs", "ten"), ConfigError);
    CHECK_THROWS_AS(apply_setting(d, "run.seed", "-1"), ConfigError);
    CHECK_THROWS_AS(parse_model_list("lr,timesfm"), ConfigError);
    CHECK_THROWS_AS(parse_model_list("lr,lr"), ConfigError);
    CHECK(parse_model_list("patchtf,lr") == std::vector<std::string>{"patchtf", "lr"});
}

TEST_CASE("defaults follow the published hyperparameters") {
    const RunConfig c;
    CHECK(c.models == std::vector<std::string>{"lr", "arima", "rnn", "patchtf"});
    CHECK(c.split == SplitSpec{2016, 2017, 2022});
    CHECK(c.rnn.layers == 2);
    CHECK(c.rnn.hidden_units == 512);
    CHECK(c.rnn.window == 5);
    CHECK(c.rnn.epochs == 72);
    CHECK(c.patchtf.context_length == 64);
    CHECK(c.patchtf.horizon == 12);
    CHECK(c.patchtf.output_patch == 128);
    CHECK(c.patchtf.learning_rate == 5e-4);
    CHECK(c.patchtf.batch_size == 64);
    CHECK(c.patchtf.epochs == 50);
}

TEST_CASE("results serialize and parse back identically") {
    auto r = two_by_two();
    CellResult failed;
    failed.key = {State::HI, Race::Hawaiian};
    failed.model = "rnn";
    failed.error = "rnn: non-finite training loss (epoch 4)";
    r.models.push_back("rnn");
    r.cells.push_back(failed);
    r.cells[0].predicted[0] = 1234.5678901234567;
    const auto text = serialize_results(r);
    CHECK(parse_results(text) == r);
    CHECK(serialize_results(parse_results(text)) == text);
    CHECK_THROWS_AS(parse_results("{}"), ResultsError);
    CHECK_THROWS_AS(parse_results("not json"), ResultsError);
    auto doc = nlohmann::json::parse(text);
    doc["cells"][0]["predicted"].push_back(5.0);
    CHECK_THROWS_AS(parse_results(doc.dump()), ResultsError);
}

TEST_CASE("ingest command on the fixture") {
    TempDir dir("cli-ingest");
    ingest::write_fixture(ingest::make_fixture({}), dir / "raw");
    const auto fred = (dir / "raw" / "fred").string();
    const auto census = (dir / "raw" / "census.csv").string();
    auto ok = invoke_cli({"ingest", "--fred-dir", fred, "--census-file", census, "--out", (dir / "out").string()});
    CHECK(ok.code == kExitOk);
    CHECK(std::filesystem::exists(dir / "out" / "dataset.json"));
    const std::regex count_line(R"(^[A-Z]{2}/\w+: \d+ points)", std::regex::multiline);
    const auto lines = std::distance(std::sregex_iterator(ok.out.begin(), ok.out.end(), count_line), std::sregex_iterator());
    CHECK(lines == 30);
    CHECK(ingest::read_dataset_file(dir / "out" / "dataset.json").series.size() == 30);

    auto missing = invoke_cli({"--out", (dir / "o2").string(), "ingest", "--fred-dir", fred, "--census-file",
                               (dir / "nope.csv").string()});
    CHECK(missing.code == kExitError);
    CHECK(missing.err.find("nope.csv") != std::string::npos);

    spit(dir / "blocker", "a file, not a directory");
    auto unwritable = invoke_cli({"ingest", "--fred-dir", fred, "--census-file", census, "--out",
                                  (dir / "blocker" / "sub").string()});
    CHECK(unwritable.code == kExitError);
    CHECK_FALSE(unwritable.err.empty());
}

TEST_CASE("bad flags exit with code 2") {
    CHECK(invoke_cli({}).code == kExitUsage);
    CHECK(invoke_cli({"frobnicate", "--out", "x"}).code == kExitUsage);
    CHECK(invoke_cli({"ingest", "--fred-dir", "a"}).code == kExitUsage);
    CHECK(invoke_cli({"--out", "x", "--seed", "-3", "run", "--dataset", "d"}).code == kExitUsage);
    CHECK(invoke_cli({"--out", "x", "--seed", "abc", "run", "--dataset", "d"}).code == kExitUsage);
    CHECK(invoke_cli({"--out", "x", "run", "--dataset", "d", "--models", "lr,gpt"}).code == kExitUsage);
    CHECK(invoke_cli({"--out", "x", "run", "--dataset", "d", "--threads", "0"}).code == kExitUsage);
    CHECK(invoke_cli({"--out", "x", "run", "--dataset", "d", "--set", "rnn.epochs"}).code == kExitUsage);
    CHECK(invoke_cli({"--out", "x", "report", "--results", "r", "--format", "xml"}).code == kExitUsage);
    CHECK(invoke_cli({"--help"}).code == kExitOk);
}

TEST_CASE("run and report on the fixture") {
    TempDir dir("cli-run");
    const auto dataset = popcast::test::ingest_fixture(dir.path());

    SUBCASE("a single model yields one result per series") {
        auto res = invoke_cli({"run", "--dataset", dataset.string(), "--models", "lr", "--seed", "7", "--out",
                               (dir / "lr").string()});
        REQUIRE(res.code == kExitOk);
        const auto results = parse_results(slurp(dir / "lr" / "results.json"));
        CHECK(results.cells.size() == 30);
        CHECK(results.seed == 7);
        for (const auto& c : results.cells) CHECK(c.ok);
        // Resolved config includes every default.
        CHECK(results.config.at("rnn.hidden_units") == "512");
        CHECK(results.config.at("patchtf.output_patch") == "128");
    }

    SUBCASE("all models, twice, byte-identical and independent of threads") {
        const auto args = concat({"run", "--dataset", dataset.string(), "--seed", "11"}, popcast::test::fast_settings());
        auto a = invoke_cli(concat(args, {"--out", (dir / "a").string(), "--threads", "1"}));
        auto b = invoke_cli(concat(args, {"--out", (dir / "b").string(), "--threads", "3"}));
        REQUIRE(a.code == kExitOk);
        REQUIRE(b.code == kExitOk);
        const auto text = slurp(dir / "a" / "results.json");
        CHECK(text == slurp(dir / "b" / "results.json"));
        const auto results = parse_results(text);
        CHECK(results.cells.size() == 120);

        // Re-running from the embedded config reproduces the file.
        auto c = invoke_cli({"--config", (dir / "a" / "results.json").string(), "run", "--out", (dir / "c").string()});
        REQUIRE(c.code == kExitOk);
        CHECK(slurp(dir / "c" / "results.json") == text);

        auto rep = invoke_cli({"report", "--results", (dir / "a" / "results.json").string(), "--out",
                               (dir / "rep").string()});
        REQUIRE(rep.code == kExitOk);
        const auto csv = slurp(dir / "rep" / "leaderboard.csv");
        CHECK(csv.starts_with("state,race,lr,arima,rnn,patchtf\n"));
        const auto json = nlohmann::json::parse(slurp(dir / "rep" / "leaderboard.json"));
        int wins = 0;
        for (const auto& w : json["win_rates"]) wins += w["wins"].get<int>();
        CHECK(wins == static_cast<int>(json["rows"].size()));
        CHECK(rep.out.find("win rate lr:") != std::string::npos);
    }

    SUBCASE("a different seed changes the neural forecasts") {
        const auto base = concat({"run", "--dataset", dataset.string(), "--models", "rnn"}, popcast::test::fast_settings());
        REQUIRE(invoke_cli(concat(base, {"--seed", "1", "--out", (dir / "s1").string()})).code == kExitOk);
        REQUIRE(invoke_cli(concat(base, {"--seed", "2", "--out", (dir / "s2").string()})).code == kExitOk);
        CHECK(slurp(dir / "s1" / "results.json") != slurp(dir / "s2" / "results.json"));
    }

    SUBCASE("validation split scores 2014-2016") {
        auto res = invoke_cli({"run", "--dataset", dataset.string(), "--models", "lr", "--validation", "--out",
                               (dir / "val").string()});
        REQUIRE(res.code == kExitOk);
        const auto results = parse_results(slurp(dir / "val" / "results.json"));
        CHECK(results.cells.front().years == std::vector<int>{2014, 2015, 2016});
    }
}

TEST_CASE("run errors") {
    TempDir dir("cli-run-err");
    auto missing = invoke_cli({"run", "--dataset", (dir / "none.json").string(), "--out", (dir / "o").string()});
    CHECK(missing.code == kExitError);
    auto no_dataset = invoke_cli({"run", "--out", (dir / "o").string()});
    CHECK(no_dataset.code == kExitUsage);
    spit(dir / "bad.conf", "rnn.epochs = lots\n");
    auto bad_config = invoke_cli({"--config", (dir / "bad.conf").string(), "run", "--dataset", "x", "--out",
                                  (dir / "o").string()});
    CHECK(bad_config.code == kExitError);
}

TEST_CASE("execute_run isolates failing cells") {
    TempDir dir("cli-isolate");
    const auto dataset = ingest::read_dataset_file(popcast::test::ingest_fixture(dir.path()));
    RunConfig config;
    config.models = {"lr", "rnn"};
    config.rnn.window = 20;  // Hawaiian series have 17 training points: too short
    config.rnn.hidden_units = 3;
    config.rnn.epochs = 1;
    const auto results = execute_run(config, dataset);
    REQUIRE(results.cells.size() == 60);
    int failed = 0;
    for (const auto& c : results.cells) {
        if (!c.ok) {
            ++failed;
            CHECK(c.model == "rnn");
            CHECK(c.key.race == Race::Hawaiian);
            CHECK(c.error.find("too few") != std::string::npos);
        }
    }
    CHECK(failed == 6);

    // The failed rows are left out of the leaderboard and listed.
    const auto summary = summarize_results(results);
    REQUIRE(summary.board);
    CHECK(summary.board->keys().size() == 24);
    CHECK(summary.omitted.size() == 6);
    CHECK(summary_text(summary).find("omitted HI/Hawaiian") != std::string::npos);

    // Every cell failing is the one case that fails the command.
    config.dataset = (dir / "data" / "dataset.json").string();
    config.models = {"rnn"};
    config.rnn.window = 40;
    std::ostringstream out, err;
    CHECK(cmd_run(config, dir / "allfail", 1, out, err) == kExitError);
}

TEST_CASE("report counts, formats and omissions") {
    TempDir dir("cli-report");
    spit(dir / "results.json", serialize_results(two_by_two()));
    auto both = invoke_cli({"report", "--results", (dir / "results.json").string(), "--out", (dir / "both").string()});
    REQUIRE(both.code == kExitOk);
    const auto csv = slurp(dir / "both" / "leaderboard.csv");
    CHECK(count_lines(csv) == 3);
    CHECK(csv.starts_with("state,race,lr,arima\n"));
    std::size_t svgs = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "both" / "plots")) svgs += e.path().extension() == ".svg";
    CHECK(svgs == 2);
    const auto svg = slurp(dir / "both" / "plots" / "AL_Asian.svg");
    CHECK(svg.find("width=\"800\"") != std::string::npos);
    CHECK(svg.find("height=\"480\"") != std::string::npos);
    CHECK(svg.find(">actual<") != std::string::npos);
    CHECK(svg.find(">lr<") != std::string::npos);

    auto json_only = invoke_cli({"--out", (dir / "json").string(), "report", "--results",
                                 (dir / "results.json").string(), "--format", "json"});
    REQUIRE(json_only.code == kExitOk);
    CHECK(std::filesystem::exists(dir / "json" / "leaderboard.json"));
    CHECK_FALSE(std::filesystem::exists(dir / "json" / "leaderboard.csv"));

    auto partial = two_by_two();
    partial.cells[3].ok = false;
    partial.cells[3].error = "arima: too short";
    partial.cells[3].years.clear();
    partial.cells[3].predicted.clear();
    partial.cells[3].actual.clear();
    spit(dir / "partial.json", serialize_results(partial));
    auto part = invoke_cli({"report", "--results", (dir / "partial.json").string(), "--out", (dir / "part").string()});
    REQUIRE(part.code == kExitOk);
    CHECK(count_lines(slurp(dir / "part" / "leaderboard.csv")) == 2);
    CHECK(part.out.find("omitted TX/Black: arima failed: arima: too short") != std::string::npos);
    const auto pj = nlohmann::json::parse(slurp(dir / "part" / "leaderboard.json"));
    CHECK(pj["omitted"].size() == 1);

    spit(dir / "broken.json", "{\"format\": \"popcast-results/1\"");
    CHECK(invoke_cli({"report", "--results", (dir / "broken.json").string(), "--out", (dir / "x").string()}).code ==
          kExitError);
    CHECK(invoke_cli({"report", "--results", (dir / "absent.json").string(), "--out", (dir / "x").string()}).code ==
          kExitError);
}

TEST_CASE("chart colors follow registration order") {
    CHECK(model_color(0) != model_color(1));
    const std::vector<ChartLine> lines{{"actual", "#000000", {2017, 2018}, {1.0, 2.0}},
                                       {"lr", model_color(0), {2017, 2018}, {1.5, 2.5}}};
    const auto a = render_svg_chart("t", lines);
    CHECK(a == render_svg_chart("t", lines));
    CHECK(a.starts_with("<svg") == true);
}
