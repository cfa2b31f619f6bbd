#pragma once

#include <cstdint>
#include <random>

namespace fishmig {

/// Seeded generator for every stochastic path in the library.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard)
/// and derives uniforms and normals itself, so a seed reproduces the same
/// trajectory on any conforming toolchain. The std distributions are
/// implementation-defined and are not used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; the spare value is cached.
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Independent child seed for parallel workers (splitmix64 of the index).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fishmig
