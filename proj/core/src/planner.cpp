#include "octoplan/planner.hpp"

#include <fmt/format.h>

namespace octoplan {

namespace {

std::string describe(const State& x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (i > 0) out += ", ";
    out += fmt::format("{}", x[i]);
  }
  return out + ")";
}

}  // namespace

void validate_problem(const PlannerProblem& problem) {
  if (!problem.world) throw InvalidProblem("planner problem has no world");
  const World& world = *problem.world;
  if (problem.x_start.dim() != world.dim() || problem.x_goal.dim() != world.dim()) {
    throw InvalidProblem("start/goal dimension does not match the world");
  }
  if (problem.goal_tolerance < 0.0 || !std::isfinite(problem.goal_tolerance)) {
    throw InvalidProblem("goal tolerance must be finite and non-negative");
  }
  if (problem.shape.radius < 0.0) throw InvalidProblem("robot radius must be non-negative");
  if (!(problem.validity.check_resolution > 0.0)) {
    throw InvalidProblem("check resolution must be positive");
  }
  if (!is_state_valid(world, problem.shape, problem.validity, problem.x_start)) {
    throw InvalidProblem("start state " + describe(problem.x_start) + " is not valid");
  }
  if (!is_state_valid(world, problem.shape, problem.validity, problem.x_goal)) {
    throw InvalidProblem("goal state " + describe(problem.x_goal) + " is not valid");
  }
}

}  // namespace octoplan
