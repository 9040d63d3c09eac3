#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace octoplan {

/// A point in the planning space: a Euclidean position in R^2 or R^3 (meters).
class State {
 public:
  static constexpr std::size_t kMaxDim = 3;

  /// Empty placeholder (dimension 0). Not a valid planning state.
  State() = default;

  /// Throws std::invalid_argument unless 2 or 3 finite coordinates are given.
  State(std::initializer_list<double> coords);
  explicit State(std::span<const double> coords);

  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return dim_ == 0; }
  double operator[](std::size_t i) const noexcept { return c_[i]; }
  std::span<const double> coords() const noexcept { return {c_.data(), dim_}; }

  State operator+(const State& o) const noexcept;
  State operator-(const State& o) const noexcept;
  State operator*(double s) const noexcept;

  /// Copy with coordinate i replaced; throws on non-finite value.
  State with(std::size_t i, double value) const;

  /// Same coordinates lifted/dropped to `dim` (new axes are `fill`).
  State resized(std::size_t dim, double fill = 0.0) const;

  bool operator==(const State& o) const noexcept = default;

  /// Lexicographic order; used to canonicalize segment endpoints.
  std::partial_ordering operator<=>(const State& o) const noexcept;

 private:
  struct Unchecked {};
  State(Unchecked, const std::array<double, kMaxDim>& c, std::size_t dim) noexcept
      : c_(c), dim_(dim) {}

  std::array<double, kMaxDim> c_{};
  std::size_t dim_ = 0;
};

/// A non-negative path/edge cost, or Infinite.
class Cost {
 public:
  constexpr Cost() = default;
  constexpr explicit Cost(double v) noexcept : v_(v) {}

  static constexpr Cost infinite() noexcept {
    return Cost(std::numeric_limits<double>::infinity());
  }
  static constexpr Cost zero() noexcept { return Cost(0.0); }

  constexpr double value() const noexcept { return v_; }
  constexpr bool is_finite() const noexcept {
    return v_ < std::numeric_limits<double>::infinity();
  }

  constexpr Cost operator+(Cost o) const noexcept { return Cost(v_ + o.v_); }
  constexpr Cost& operator+=(Cost o) noexcept {
    v_ += o.v_;
    return *this;
  }
  constexpr auto operator<=>(const Cost&) const = default;

 private:
  double v_ = 0.0;
};

/// Axis-aligned box [min, max] with positive extent on every axis.
class Bounds {
 public:
  Bounds() = default;
  /// Throws std::invalid_argument on dimension mismatch or non-positive extent.
  Bounds(State min, State max);

  const State& min() const noexcept { return min_; }
  const State& max() const noexcept { return max_; }
  std::size_t dim() const noexcept { return min_.dim(); }
  double extent(std::size_t axis) const noexcept { return max_[axis] - min_[axis]; }
  double volume() const noexcept;
  double diagonal() const noexcept;

  /// Closed-box membership.
  bool contains(const State& x) const noexcept;

 private:
  State min_;
  State max_;
};

struct Path {
  std::vector<State> states;
  Cost cost = Cost::infinite();
};

/// Euclidean distance. Throws std::invalid_argument on dimension mismatch.
Cost distance(const State& a, const State& b);

/// Unchecked squared distance for hot loops (dimensions must already agree).
inline double squared_distance(const State& a, const State& b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

/// a + t (b - a). Throws std::invalid_argument if t is outside [0, 1] or the
/// dimensions differ.
State interpolate(const State& a, const State& b, double t);

/// Sum of consecutive state distances.
Cost path_length(std::span<const State> states);

/// Lebesgue measure of the unit n-ball.
double unit_ball_measure(std::size_t n);

}  // namespace octoplan
