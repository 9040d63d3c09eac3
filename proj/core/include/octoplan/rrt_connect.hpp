#pragma once

#include <cstdint>
#include <optional>

#include "octoplan/planner.hpp"
#include "octoplan/random.hpp"
#include "octoplan/spatial_hash.hpp"

namespace octoplan {

struct RrtConnectConfig {
  /// Steering extent in meters; unset means 5% of the bounds diagonal.
  std::optional<double> step_size;
};

/// RRT-Connect: two trees, one extend toward a random state and one greedy
/// connect of the other tree per iteration, swapping roles each time. Stops at
/// the first feasible path.
class RrtConnectPlanner {
 public:
  /// Throws InvalidProblem if the problem is rejected or the step is not positive.
  RrtConnectPlanner(PlannerProblem problem, std::uint64_t seed, RrtConnectConfig cfg = {});

  PlanResult plan(const Termination& stop, const SolutionCallback& on_solution = {});

  double step_size() const noexcept { return step_; }
  std::size_t tree_size(int tree) const noexcept {
    return trees_[static_cast<std::size_t>(tree)].nodes.size();
  }

 private:
  struct Node {
    State x;
    int parent;
  };
  struct Tree {
    std::vector<Node> nodes;
    SpatialHash index;
  };
  enum class Growth { Trapped, Advanced, Reached };

  PlannerProblem problem_;
  RandomSource rng_;
  ValidityChecker checker_;
  double step_;
  Tree trees_[2];

  Growth extend(Tree& tree, const State& toward, int& new_id);
  Growth connect(Tree& tree, const State& toward, int& new_id);
  std::vector<State> chain(const Tree& tree, int id) const;
};

}  // namespace octoplan
