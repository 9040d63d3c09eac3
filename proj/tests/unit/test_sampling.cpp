#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "octoplan/random.hpp"
#include "octoplan/sampling.hpp"

using namespace octoplan;

namespace {

bool member(const State& a, const State& b, double c, const State& x) {
  return distance(a, x).value() + distance(x, b).value() <= c;
}

}  // namespace

TEST_CASE("uniform samples stay in the box and split evenly") {
  const Bounds unit(State{0, 0}, State{1, 1});
  RandomSource rng(1);
  int left = 0;
  for (int i = 0; i < 10000; ++i) {
    const State x = sample_uniform(unit, rng);
    REQUIRE(x[0] >= 0.0);
    REQUIRE(x[0] < 1.0);
    REQUIRE(x[1] >= 0.0);
    REQUIRE(x[1] < 1.0);
    if (x[0] < 0.5) ++left;
  }
  CHECK(std::abs(left / 10000.0 - 0.5) <= 0.02);
}

TEST_CASE("unit ball samples lie in the ball") {
  RandomSource rng(2);
  for (std::size_t n : {2u, 3u}) {
    for (int i = 0; i < 5000; ++i) {
      const State u = sample_unit_ball(n, rng);
      REQUIRE(u.dim() == n);
      REQUIRE(squared_distance(u, State(std::vector<double>(n, 0.0))) <= 1.0);
    }
  }
}

TEST_CASE("informed set geometry") {
  const InformedSet s(State{0, 0}, State{4, 0}, Cost(5.0));
  CHECK(s.c_min().value() == doctest::Approx(4.0));
  CHECK(s.transverse_semi_axis() == doctest::Approx(2.5));
  CHECK(s.conjugate_semi_axis() == doctest::Approx(1.5));
  CHECK(s.measure() == doctest::Approx(std::numbers::pi * 2.5 * 1.5));
  CHECK(s.center() == State{2, 0});
  CHECK(s.contains(State{2, 1.5}));
  CHECK_FALSE(s.contains(State{2, 1.6}));
  CHECK_THROWS_AS(InformedSet(State{0, 0}, State{4, 0}, Cost(3.0)), std::invalid_argument);
  CHECK_THROWS_AS(InformedSet(State{0, 0}, State{4, 0}, Cost::infinite()), std::invalid_argument);
}

TEST_CASE("informed samples satisfy the membership predicate") {
  const State a{0, 0}, b{4, 0};
  const InformedSet s(a, b, Cost(5.0));
  const Bounds wide(State{-5, -5}, State{10, 5});
  RandomSource rng(3);
  for (int i = 0; i < 10000; ++i) {
    const State x = sample_informed(s, wide, rng);
    REQUIRE(member(a, b, 5.0, x));
    REQUIRE(wide.contains(x));
  }
}

TEST_CASE("degenerate informed set samples the focal segment") {
  const State a{0, 0, 0}, b{1, 1, 1};
  const double c = distance(a, b).value();
  const InformedSet s(a, b, Cost(c));
  const Bounds box(State{-1, -1, -1}, State{2, 2, 2});
  RandomSource rng(4);
  for (int i = 0; i < 1000; ++i) {
    const State x = sample_informed(s, box, rng);
    REQUIRE(distance(a, x).value() + distance(x, b).value() - c <= 1e-9);
  }
}

TEST_CASE("informed samples are clipped to the bounds") {
  const State a{0, 0}, b{1, 0};
  const InformedSet s(a, b, Cost(1.5));
  const Bounds tight(State{-0.1, -0.1}, State{1.1, 0.1});
  RandomSource rng(5);
  SamplingStats stats;
  for (int i = 0; i < 2000; ++i) {
    const State x = sample_informed(s, tight, rng, &stats);
    REQUIRE(tight.contains(x));
    REQUIRE(member(a, b, 1.5, x));
  }
  CHECK(stats.rejections > 0);
  CHECK(stats.fallbacks == 0);
}

TEST_CASE("axis extents match the semi-axes within 2 percent") {
  for (std::size_t n : {2u, 3u}) {
    const State a = n == 2 ? State{-1, 0} : State{-1, 0, 0};
    const State b = n == 2 ? State{1, 0} : State{1, 0, 0};
    const double c = 3.0;
    const InformedSet s(a, b, Cost(c));
    const Bounds big = n == 2 ? Bounds(State{-5, -5}, State{5, 5})
                              : Bounds(State{-5, -5, -5}, State{5, 5, 5});
    RandomSource rng(6 + n);
    std::vector<double> lo(n, 1e9), hi(n, -1e9);
    for (int i = 0; i < 100000; ++i) {
      const State x = sample_informed(s, big, rng);
      for (std::size_t k = 0; k < n; ++k) {
        lo[k] = std::min(lo[k], x[k]);
        hi[k] = std::max(hi[k], x[k]);
      }
    }
    const double transverse = c / 2.0;
    const double conjugate = std::sqrt(c * c - 4.0) / 2.0;
    CHECK((hi[0] - lo[0]) / 2.0 == doctest::Approx(transverse).epsilon(0.02));
    for (std::size_t k = 1; k < n; ++k) {
      CHECK((hi[k] - lo[k]) / 2.0 == doctest::Approx(conjugate).epsilon(0.02));
    }
  }
}

TEST_CASE("halves of the ellipse get balanced counts") {
  const InformedSet s(State{0, 0}, State{2, 1}, Cost(3.0));
  const Bounds big(State{-5, -5}, State{5, 5});
  RandomSource rng(10);
  const int n = 20000;
  int near_a = 0;
  for (int i = 0; i < n; ++i) {
    const State x = sample_informed(s, big, rng);
    // The minor axis splits the foci.
    if (distance(x, s.focus_a()) < distance(x, s.focus_b())) ++near_a;
  }
  const double sigma = std::sqrt(n * 0.25);
  CHECK(std::abs(near_a - n / 2.0) <= 3.0 * sigma);
}

TEST_CASE("sample_batch counts and modes") {
  const Bounds b(State{0, 0}, State{2, 1});
  RandomSource rng(12);
  const auto uni = sample_batch(100, State{0.2, 0.5}, State{1.8, 0.5}, Cost::infinite(), b, rng);
  CHECK(uni.size() == 100);
  for (const auto& x : uni) CHECK(b.contains(x));
  const auto inf = sample_batch(100, State{0.2, 0.5}, State{1.8, 0.5}, Cost(1.7), b, rng);
  CHECK(inf.size() == 100);
  for (const auto& x : inf) CHECK(member(State{0.2, 0.5}, State{1.8, 0.5}, 1.7, x));
  CHECK(sample_batch(1, State{0.2, 0.5}, State{1.8, 0.5}, Cost(1.7), b, rng).size() == 1);
}

TEST_CASE("sampling domain measure") {
  const Bounds b(State{0, 0}, State{2, 1});
  CHECK(sampling_domain_measure(b, State{0.5, 0.5}, State{1.5, 0.5}, Cost::infinite()) ==
        doctest::Approx(2.0));
  const double ellipse = std::numbers::pi * 0.6 * std::sqrt(1.44 - 1.0) / 2.0;
  CHECK(sampling_domain_measure(b, State{0.5, 0.5}, State{1.5, 0.5}, Cost(1.2)) ==
        doctest::Approx(ellipse));
  CHECK(sampling_domain_measure(b, State{0.5, 0.5}, State{1.5, 0.5}, Cost(100.0)) ==
        doctest::Approx(2.0));
}

TEST_CASE("sampling is deterministic for a seed") {
  const Bounds b(State{0, 0, 0}, State{1, 1, 1});
  RandomSource r1(99), r2(99);
  const auto s1 = sample_batch(50, State{0.1, 0.1, 0.1}, State{0.9, 0.9, 0.9}, Cost(1.6), b, r1);
  const auto s2 = sample_batch(50, State{0.1, 0.1, 0.1}, State{0.9, 0.9, 0.9}, Cost(1.6), b, r2);
  CHECK(s1 == s2);
}
