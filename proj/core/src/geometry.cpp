#include "octoplan/geometry.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace octoplan {

namespace {

std::array<double, State::kMaxDim> checked_coords(std::span<const double> coords) {
  if (coords.size() != 2 && coords.size() != 3) {
    throw std::invalid_argument("State: dimension must be 2 or 3, got " +
                                std::to_string(coords.size()));
  }
  std::array<double, State::kMaxDim> c{};
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords[i])) {
      throw std::invalid_argument("State: coordinate " + std::to_string(i) + " is not finite");
    }
    c[i] = coords[i];
  }
  return c;
}

void require_same_dim(const State& a, const State& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

State::State(std::initializer_list<double> coords)
    : State(std::span<const double>(coords.begin(), coords.size())) {}

State::State(std::span<const double> coords) : c_(checked_coords(coords)), dim_(coords.size()) {}

State State::operator+(const State& o) const noexcept {
  auto c = c_;
  for (std::size_t i = 0; i < dim_; ++i) c[i] += o.c_[i];
  return State(Unchecked{}, c, dim_);
}

State State::operator-(const State& o) const noexcept {
  auto c = c_;
  for (std::size_t i = 0; i < dim_; ++i) c[i] -= o.c_[i];
  return State(Unchecked{}, c, dim_);
}

State State::operator*(double s) const noexcept {
  auto c = c_;
  for (std::size_t i = 0; i < dim_; ++i) c[i] *= s;
  return State(Unchecked{}, c, dim_);
}

State State::with(std::size_t i, double value) const {
  if (i >= dim_) throw std::invalid_argument("State::with: axis out of range");
  if (!std::isfinite(value)) throw std::invalid_argument("State::with: value is not finite");
  auto c = c_;
  c[i] = value;
  return State(Unchecked{}, c, dim_);
}

State State::resized(std::size_t dim, double fill) const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("State::resized: dimension must be 2 or 3");
  std::array<double, kMaxDim> c{};
  for (std::size_t i = 0; i < dim; ++i) c[i] = i < dim_ ? c_[i] : fill;
  return State(std::span<const double>(c.data(), dim));
}

std::partial_ordering State::operator<=>(const State& o) const noexcept {
  if (auto cmp = dim_ <=> o.dim_; cmp != 0) return cmp;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (auto cmp = c_[i] <=> o.c_[i]; cmp != 0) return cmp;
  }
  return std::partial_ordering::equivalent;
}

Bounds::Bounds(State min, State max) : min_(min), max_(max) {
  require_same_dim(min_, max_, "Bounds");
  if (min_.empty()) throw std::invalid_argument("Bounds: empty corner states");
  for (std::size_t i = 0; i < min_.dim(); ++i) {
    if (!(max_[i] > min_[i])) {
      throw std::invalid_argument("Bounds: non-positive extent on axis " + std::to_string(i));
    }
  }
}

double Bounds::volume() const noexcept {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= extent(i);
  return v;
}

double Bounds::diagonal() const noexcept { return std::sqrt(squared_distance(min_, max_)); }

bool Bounds::contains(const State& x) const noexcept {
  if (x.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (x[i] < min_[i] || x[i] > max_[i]) return false;
  }
  return true;
}

Cost distance(const State& a, const State& b) {
  require_same_dim(a, b, "distance");
  return Cost(std::sqrt(squared_distance(a, b)));
}

State interpolate(const State& a, const State& b, double t) {
  require_same_dim(a, b, "interpolate");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("interpolate: t outside [0, 1]");
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return a + (b - a) * t;
}

Cost path_length(std::span<const State> states) {
  Cost total = Cost::zero();
  for (std::size_t i = 1; i < states.size(); ++i) total += distance(states[i - 1], states[i]);
  return total;
}

double unit_ball_measure(std::size_t n) {
  switch (n) {
    case 1:
      return 2.0;
    case 2:
      return std::numbers::pi;
    case 3:
      return 4.0 / 3.0 * std::numbers::pi;
    default:
      return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
  }
}

}  // namespace octoplan
