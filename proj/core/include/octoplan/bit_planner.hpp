#pragma once

#include <cstdint>
#include <memory>

#include "octoplan/bit_tree.hpp"
#include "octoplan/planner.hpp"
#include "octoplan/random.hpp"

namespace octoplan {

struct BitPlannerConfig {
  std::size_t batch_size = 100;
  double rgg_eta = 1.1;
};

/// Single-tree BIT*. The goal is the ball of radius goal_tolerance around
/// x_goal; the goal state itself is the first sample.
class BitPlanner {
 public:
  /// Throws InvalidProblem if the problem is rejected.
  BitPlanner(PlannerProblem problem, std::uint64_t seed, BitPlannerConfig cfg = {});

  PlanResult plan(const Termination& stop, const SolutionCallback& on_solution = {});

  const BitSearchTree& tree() const noexcept { return *tree_; }
  const PlannerProblem& problem() const noexcept { return problem_; }
  Cost best_cost() const noexcept { return c_best_; }
  const SamplingStats& sampling_stats() const noexcept { return sampling_; }

 private:
  PlannerProblem problem_;
  BitPlannerConfig cfg_;
  RandomSource rng_;
  ValidityChecker checker_;
  std::unique_ptr<BitSearchTree> tree_;
  Cost c_best_ = Cost::infinite();
  SamplingStats sampling_;
};

}  // namespace octoplan
