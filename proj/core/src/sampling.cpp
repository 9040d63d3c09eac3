#include "octoplan/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace octoplan {

namespace {

State unit_axis(std::size_t n, std::size_t axis) {
  std::array<double, State::kMaxDim> c{};
  c[axis] = 1.0;
  return State(std::span<const double>(c.data(), n));
}

double dot(const State& a, const State& b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

InformedSet::InformedSet(State focus_a, State focus_b, Cost c_best)
    : a_(focus_a), b_(focus_b), c_best_(c_best), c_min_(distance(focus_a, focus_b)) {
  if (!c_best_.is_finite()) throw std::invalid_argument("InformedSet: c_best must be finite");
  const double slack = 1e-9 * std::max(1.0, c_min_.value());
  if (c_best_.value() < c_min_.value() - slack) {
    throw std::invalid_argument("InformedSet: c_best below the focal distance");
  }
  const std::size_t n = a_.dim();
  center_ = (a_ + b_) * 0.5;

  // Gram-Schmidt completion of the focal axis.
  std::size_t filled = 0;
  if (c_min_.value() > 0.0) basis_[filled++] = (b_ - a_) * (1.0 / c_min_.value());
  for (std::size_t axis = 0; axis < n && filled < n; ++axis) {
    State v = unit_axis(n, axis);
    for (std::size_t j = 0; j < filled; ++j) v = v - basis_[j] * dot(v, basis_[j]);
    const double norm = std::sqrt(dot(v, v));
    if (norm > 1e-6) basis_[filled++] = v * (1.0 / norm);
  }
}

double InformedSet::conjugate_semi_axis() const noexcept {
  const double c = c_best_.value();
  const double m = c_min_.value();
  return std::sqrt(std::max(0.0, c * c - m * m)) / 2.0;
}

double InformedSet::measure() const noexcept {
  const std::size_t n = a_.dim();
  return unit_ball_measure(n) * transverse_semi_axis() *
         std::pow(conjugate_semi_axis(), static_cast<double>(n - 1));
}

bool InformedSet::contains(const State& x) const noexcept {
  return std::sqrt(squared_distance(a_, x)) + std::sqrt(squared_distance(x, b_)) <=
         c_best_.value();
}

State InformedSet::from_unit_ball(const State& u) const noexcept {
  const double ta = transverse_semi_axis();
  const double cb = conjugate_semi_axis();
  State x = center_;
  for (std::size_t i = 0; i < u.dim(); ++i) x = x + basis_[i] * (u[i] * (i == 0 ? ta : cb));
  return x;
}

State sample_uniform(const Bounds& bounds, RandomSource& rng) {
  std::array<double, State::kMaxDim> c{};
  for (std::size_t i = 0; i < bounds.dim(); ++i) {
    c[i] = rng.draw_uniform(bounds.min()[i], bounds.max()[i]);
  }
  return State(std::span<const double>(c.data(), bounds.dim()));
}

State sample_unit_ball(std::size_t n, RandomSource& rng) {
  std::array<double, State::kMaxDim> c{};
  for (;;) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = rng.draw_uniform(-1.0, 1.0);
      r2 += c[i] * c[i];
    }
    if (r2 <= 1.0) return State(std::span<const double>(c.data(), n));
  }
}

State sample_informed(const InformedSet& set, const Bounds& bounds, RandomSource& rng,
                      SamplingStats* stats) {
  for (std::size_t attempt = 0; attempt < kInformedRejectionCap; ++attempt) {
    const State x = set.from_unit_ball(sample_unit_ball(bounds.dim(), rng));
    // The membership re-check only discards rounding-level boundary cases.
    if (bounds.contains(x) && set.contains(x)) return x;
    if (stats) ++stats->rejections;
  }
  if (stats) ++stats->fallbacks;
  spdlog::warn("informed sampling: {} rejections against bounds, falling back to uniform",
               kInformedRejectionCap);
  return sample_uniform(bounds, rng);
}

std::vector<State> sample_batch(std::size_t m, const State& x_start, const State& x_goal, Cost c_i,
                                const Bounds& bounds, RandomSource& rng, SamplingStats* stats) {
  if (m < 1) throw std::invalid_argument("sample_batch: m must be at least 1");
  std::vector<State> out;
  out.reserve(m);
  if (!c_i.is_finite()) {
    for (std::size_t i = 0; i < m; ++i) out.push_back(sample_uniform(bounds, rng));
    return out;
  }
  const InformedSet set(x_start, x_goal, c_i);
  for (std::size_t i = 0; i < m; ++i) out.push_back(sample_informed(set, bounds, rng, stats));
  return out;
}

double sampling_domain_measure(const Bounds& bounds, const State& x_start, const State& x_goal,
                               Cost c_i) {
  const double box = bounds.volume();
  if (!c_i.is_finite()) return box;
  return std::min(box, InformedSet(x_start, x_goal, c_i).measure());
}

}  // namespace octoplan
