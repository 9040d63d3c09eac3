#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "octoplan/geometry.hpp"
#include "octoplan/random.hpp"

namespace octoplan {

/// Prolate hyperspheroid {x : d(a, x) + d(x, b) <= c_best} with foci a and b.
class InformedSet {
 public:
  /// Throws std::invalid_argument if c_best is not finite or is below the
  /// focal distance (beyond rounding slack).
  InformedSet(State focus_a, State focus_b, Cost c_best);

  const State& focus_a() const noexcept { return a_; }
  const State& focus_b() const noexcept { return b_; }
  Cost c_best() const noexcept { return c_best_; }
  Cost c_min() const noexcept { return c_min_; }
  const State& center() const noexcept { return center_; }

  double transverse_semi_axis() const noexcept { return c_best_.value() / 2.0; }
  double conjugate_semi_axis() const noexcept;
  double measure() const noexcept;

  bool contains(const State& x) const noexcept;

  /// Maps a point of the unit ball into the set.
  State from_unit_ball(const State& u) const noexcept;

 private:
  State a_;
  State b_;
  Cost c_best_;
  Cost c_min_;
  State center_;
  std::array<State, State::kMaxDim> basis_;  // columns of the rotation
};

struct SamplingStats {
  std::uint64_t rejections = 0;
  std::uint64_t fallbacks = 0;
};

/// Uniform state in the closed-open box [min, max).
State sample_uniform(const Bounds& bounds, RandomSource& rng);

/// Uniform point of the unit n-ball, by rejection from the enclosing cube.
State sample_unit_ball(std::size_t n, RandomSource& rng);

/// Per-sample rejection cap before falling back to uniform-in-bounds.
inline constexpr std::size_t kInformedRejectionCap = 1000;

/// Uniform over the informed set intersected with the bounds. After
/// kInformedRejectionCap rejections it logs a warning and returns a uniform
/// in-bounds state instead.
State sample_informed(const InformedSet& set, const Bounds& bounds, RandomSource& rng,
                      SamplingStats* stats = nullptr);

/// m states: informed when c_i is finite, uniform otherwise.
std::vector<State> sample_batch(std::size_t m, const State& x_start, const State& x_goal, Cost c_i,
                                const Bounds& bounds, RandomSource& rng,
                                SamplingStats* stats = nullptr);

/// Measure of the sampling domain: the bounds volume, or the smaller of it
/// and the informed-set measure when c_i is finite.
double sampling_domain_measure(const Bounds& bounds, const State& x_start, const State& x_goal,
                               Cost c_i);

}  // namespace octoplan
