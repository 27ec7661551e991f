#pragma once

// Deterministic random streams and a small data-parallel loop.  Every
// sample index gets its own generator derived from (seed, index), so results
// do not depend on the number of worker threads.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace alexkit {

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t index) : gen_(stream_seed(seed, index)) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    double uniform01() { return uniform(0.0, 1.0); }
    /// Uniform integer in [lo, hi].
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(gen_);
    }
    bool coin(double p_true) { return uniform01() < p_true; }
    std::mt19937_64& engine() { return gen_; }

  private:
    std::mt19937_64 gen_;
};

/// Worker count: ALEXKIT_THREADS if set (>= 1), else hardware concurrency.
[[nodiscard]] unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads.  The body
/// must only write to per-index storage.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Half-width of the Wilson score interval for k successes in n trials.
[[nodiscard]] double wilson_half_width(std::size_t k, std::size_t n, double z = 1.959963984540054);

}  // namespace alexkit
