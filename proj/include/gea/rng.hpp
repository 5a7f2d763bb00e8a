#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace gea {

/// Deterministic generator used everywhere randomness enters a run.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are not, so the two draws we need
/// (uniform index, Bernoulli) are defined here on raw 64-bit outputs to keep
/// transcripts identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n) by rejection on the top of the 64-bit range.
    std::size_t uniform_index(std::size_t n);

    /// Uniform double in [0, 1) built from the high 53 bits of one draw.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Consumes exactly one draw regardless of p.
    bool bernoulli(double p) { return unit() < p; }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Sub-generator seed for one (run, iteration, agent, stream) tuple:
/// mix64(mix64(mix64(mix64(run) ^ iteration) ^ agent) ^ stream).
std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t iteration,
                          std::uint64_t agent, std::uint64_t stream = 0);

}  // namespace gea
