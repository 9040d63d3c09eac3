#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace octoplan {

/// Seeded, single-owner source of randomness. Every stochastic routine in the
/// library takes one of these explicitly; equal seeds and equal call sequences
/// give equal outputs on every platform.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform real in [0, 1), built from the top 53 bits of one engine draw.
  double draw_uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform real in [lo, hi).
  double draw_uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * draw_uniform();
  }

  /// Uniform index in [0, n). Requires n > 0.
  std::size_t draw_index(std::size_t n) noexcept {
    auto i = static_cast<std::size_t>(draw_uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace octoplan
