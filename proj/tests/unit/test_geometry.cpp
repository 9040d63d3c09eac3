#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "octoplan/geometry.hpp"
#include "octoplan/random.hpp"

using namespace octoplan;

TEST_CASE("distance on simple triples") {
  CHECK(distance(State{0, 0, 0}, State{1, 2, 2}).value() == doctest::Approx(3.0));
  CHECK(distance(State{5, 5}, State{5, 5}).value() == 0.0);
  CHECK(distance(State{0, 0}, State{0.3, 0.4}).value() == doctest::Approx(0.5));
  CHECK_THROWS_AS(distance(State{0, 0}, State{0, 0, 0}), std::invalid_argument);
}

TEST_CASE("state construction rejects bad coordinates") {
  CHECK_THROWS_AS(State({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(State({1.0, 2.0, 3.0, 4.0}), std::invalid_argument);
  CHECK_THROWS_AS(State({1.0, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(State({INFINITY, 0.0}), std::invalid_argument);
  CHECK(State{}.empty());
}

TEST_CASE("interpolate") {
  CHECK(interpolate(State{0, 0}, State{2, 2}, 0.0) == State{0, 0});
  CHECK(interpolate(State{0, 0}, State{2, 2}, 0.5) == State{1, 1});
  CHECK(interpolate(State{1, 1, 1}, State{1, 1, 1}, 0.7) == State{1, 1, 1});
  CHECK_THROWS_AS(interpolate(State{0, 0}, State{1, 1}, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(interpolate(State{0, 0}, State{1, 1}, -0.1), std::invalid_argument);
}

TEST_CASE("cost arithmetic with infinity") {
  const Cost inf = Cost::infinite();
  CHECK(inf > Cost(1e300));
  CHECK_FALSE((inf + Cost(1.0)).is_finite());
  CHECK((Cost(1.0) + Cost(2.0)).value() == 3.0);
  CHECK(Cost::zero() < Cost(1e-12));
}

TEST_CASE("bounds reject degenerate extents") {
  CHECK_THROWS_AS(Bounds(State{0, 0}, State{1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Bounds(State{0, 0}, State{1, 1, 1}), std::invalid_argument);
  const Bounds b(State{0, 0}, State{2, 1});
  CHECK(b.volume() == doctest::Approx(2.0));
  CHECK(b.diagonal() == doctest::Approx(std::sqrt(5.0)));
  CHECK(b.contains(State{2, 1}));
  CHECK_FALSE(b.contains(State{2.0001, 1}));
}

TEST_CASE("path length sums segments") {
  const std::vector<State> pts{State{0, 0}, State{3, 4}, State{3, 5}};
  CHECK(path_length(pts).value() == doctest::Approx(6.0));
}

TEST_CASE("unit ball measures") {
  CHECK(unit_ball_measure(2) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_measure(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
}

TEST_CASE("draw_uniform range, mean and determinism") {
  RandomSource a(42);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double v = a.draw_uniform();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    sum += v;
  }
  CHECK(sum / 10000.0 == doctest::Approx(0.5).epsilon(0.04));

  RandomSource c(7), d(7);
  for (int i = 0; i < 1000; ++i) REQUIRE(c.draw_uniform() == d.draw_uniform());
}

TEST_CASE("property: triangle inequality and interpolation on the segment") {
  RandomSource rng(3);
  auto rnd = [&](std::size_t n) {
    return n == 2 ? State{rng.draw_uniform(-5, 5), rng.draw_uniform(-5, 5)}
                  : State{rng.draw_uniform(-5, 5), rng.draw_uniform(-5, 5), rng.draw_uniform(-5, 5)};
  };
  for (std::size_t n : {2u, 3u}) {
    for (int i = 0; i < 2000; ++i) {
      const State a = rnd(n), b = rnd(n), c = rnd(n);
      REQUIRE(distance(a, c).value() <= distance(a, b).value() + distance(b, c).value() + 1e-12);
      REQUIRE(distance(a, b) == distance(b, a));
      const double t = rng.draw_uniform();
      const State x = interpolate(a, b, t);
      REQUIRE(distance(a, x).value() + distance(x, b).value() ==
              doctest::Approx(distance(a, b).value()).epsilon(1e-9));
    }
  }
}
