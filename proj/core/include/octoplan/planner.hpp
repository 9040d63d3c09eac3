#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "octoplan/geometry.hpp"
#include "octoplan/world.hpp"

namespace octoplan {

/// Stop conditions; whichever is hit first ends the run.
struct Termination {
  double time_budget_ms = std::numeric_limits<double>::infinity();
  std::uint64_t max_iterations = std::numeric_limits<std::uint64_t>::max();
  /// Stop once the best cost is at or below this value.
  std::optional<double> target_cost;
};

/// One improved solution, in emission order.
struct SolutionEvent {
  std::uint64_t iteration = 0;
  double elapsed_ms = 0.0;
  Cost cost = Cost::infinite();
  Path path;
};

using SolutionCallback = std::function<void(const SolutionEvent&)>;

struct PlanStats {
  std::uint64_t iterations = 0;
  std::uint64_t batches = 0;
  std::uint64_t state_checks = 0;
  std::uint64_t motion_checks = 0;
  std::size_t vertices = 0;
  double elapsed_ms = 0.0;
};

struct PlanResult {
  std::optional<Path> path;
  std::vector<SolutionEvent> improvements;
  PlanStats stats;

  bool solved() const noexcept { return path.has_value(); }
};

/// A single-query planning problem. The goal region is the ball of radius
/// goal_tolerance around x_goal.
struct PlannerProblem {
  std::shared_ptr<const World> world;
  RobotShape shape;
  ValidityConfig validity;
  State x_start;
  State x_goal;
  double goal_tolerance = 0.0;
};

/// Thrown when a problem is rejected before planning starts.
class InvalidProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws InvalidProblem if the start or goal is not a valid state.
void validate_problem(const PlannerProblem& problem);

/// Wall-clock helper shared by the planners.
class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace octoplan
