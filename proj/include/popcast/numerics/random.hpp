#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace popcast::numerics {

/// Seeded generator with platform-independent real/normal draws. The engine is
/// mt19937_64 (fully specified by the standard); the distribution math is ours
/// because std:: distributions differ between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). Throws std::invalid_argument when n == 0.
    std::uint64_t below(std::uint64_t n);
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stable seed for a named sub-stream, e.g. derive_seed(seed, "NY/White|rnn").
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

}  // namespace popcast::numerics
