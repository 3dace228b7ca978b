// Writes a synthetic FRED + census input tree for trying the CLI without real data.
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "popcast/ingest/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Write a synthetic 30-series FRED/census fixture"};
    std::string out;
    std::uint64_t seed = 1;
    app.add_option("--out", out, "Directory to create (gets fred/ and census.csv)")->required();
    app.add_option("--seed", seed, "Generator seed");
    CLI11_PARSE(app, argc, argv);
    try {
        popcast::ingest::FixtureOptions options;
        options.seed = seed;
        popcast::ingest::write_fixture(popcast::ingest::make_fixture(options), out);
    } catch (const std::exception& e) {
        std::cerr << "make_fixture: " << e.what() << "\n";
        return 1;
    }
    std::cout << "wrote " << out << "/fred and " << out << "/census.csv\n";
    return 0;
}
