#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "octoplan/bit_tree.hpp"
#include "octoplan/planner.hpp"
#include "octoplan/random.hpp"
#include "octoplan/spatial_hash.hpp"

namespace octoplan {

enum class ConnectionStrategy { NearestNeighbor, RandomNode };

const char* to_string(ConnectionStrategy s) noexcept;

struct StrategyConfig {
  /// Probability of connecting to the nearest vertex of the other tree.
  double p_nearest = 0.5;
};

struct DualBitConfig {
  std::size_t batch_size = 100;
  double rgg_eta = 1.1;
  StrategyConfig strategy;
};

/// One straight-line attempt to join the trees. `from_tree` is 0 when the
/// source vertex belongs to the start tree.
struct ConnectionAttempt {
  ConnectionStrategy strategy = ConnectionStrategy::NearestNeighbor;
  int from_tree = 0;
  int source_id = -1;
  int target_id = -1;
  State source;
  State target;
  /// Unset when the heuristic cost could not beat the best solution, in
  /// which case the motion is not checked.
  std::optional<bool> motion_valid;
  /// Valid and cheaper than the previous best solution.
  bool succeeded = false;
  Cost cost = Cost::infinite();
};

/// The pairing of a start-tree vertex with a goal-tree vertex.
struct TreeConnection {
  int start_vertex = -1;
  int goal_vertex = -1;
};

struct QueueSizes {
  std::size_t start_vertices = 0;
  std::size_t start_edges = 0;
  std::size_t goal_vertices = 0;
  std::size_t goal_edges = 0;

  std::size_t total() const noexcept {
    return start_vertices + start_edges + goal_vertices + goal_edges;
  }
};

/// Optional instrumentation hooks, all called synchronously.
struct DualObserver {
  /// A tree drew a new batch; `tree` is 0 for the start tree.
  std::function<void(int tree, const std::vector<State>& samples, Cost c_i)> on_batch;
  std::function<void(double draw, ConnectionStrategy chosen)> on_strategy_draw;
  /// Called after each attempt with the queue sizes at that moment.
  std::function<void(const ConnectionAttempt&, const QueueSizes&)> on_connection;
  std::function<void(std::uint64_t iteration)> on_iteration;
};

/// Vertex of `tree` nearest to `source`; ties go to the earlier vertex.
int strategy_nearest(const State& source, const BitSearchTree& tree);
/// Uniformly drawn vertex of `tree`.
int strategy_random(const BitSearchTree& tree, RandomSource& rng);

/// Bidirectional BIT*: a start-rooted and a goal-rooted tree, each searching
/// toward the other's root, joined by straight-line connection attempts from
/// each tree's most recently added vertex.
class DualBitPlanner {
 public:
  /// Throws InvalidProblem if the problem is rejected or P is outside [0, 1].
  DualBitPlanner(PlannerProblem problem, std::uint64_t seed, DualBitConfig cfg = {});

  PlanResult plan(const Termination& stop, const SolutionCallback& on_solution = {});

  /// One tree step for each tree, then connect_trees.
  void iterate();
  /// Attempts one connection per direction with a single strategy draw.
  std::vector<ConnectionAttempt> connect_trees();
  /// Throws std::logic_error when no connection has been found.
  Path extract_solution() const;

  void set_observer(DualObserver obs) { observer_ = std::move(obs); }

  BitSearchTree& start_tree() noexcept { return *trees_[0]; }
  BitSearchTree& goal_tree() noexcept { return *trees_[1]; }
  const BitSearchTree& start_tree() const noexcept { return *trees_[0]; }
  const BitSearchTree& goal_tree() const noexcept { return *trees_[1]; }

  Cost best_cost() const noexcept { return c_best_; }
  /// Incumbent used by each tree for gating and pruning.
  Cost incumbent(int tree) const noexcept { return c_i_[static_cast<std::size_t>(tree)]; }
  const std::optional<TreeConnection>& best_connection() const noexcept { return best_; }
  QueueSizes queue_sizes() const noexcept;
  std::uint64_t iterations() const noexcept { return iterations_; }
  const PlannerProblem& problem() const noexcept { return problem_; }
  const ValidityChecker& checker() const noexcept { return checker_; }
  RandomSource& rng() noexcept { return rng_; }

  /// Marks a vertex as the next connection source for its tree.
  void set_pending(int tree, int vertex_id);

 private:
  struct NearestIndex {
    SpatialHash hash;
    std::uint64_t batch = ~std::uint64_t{0};
    std::size_t synced = 0;
  };

  PlannerProblem problem_;
  DualBitConfig cfg_;
  RandomSource rng_;
  ValidityChecker checker_;
  std::array<std::unique_ptr<BitSearchTree>, 2> trees_;
  std::array<Cost, 2> c_i_{Cost::infinite(), Cost::infinite()};
  std::array<std::optional<int>, 2> pending_;
  std::array<NearestIndex, 2> index_;
  Cost c_best_ = Cost::infinite();
  std::optional<TreeConnection> best_;
  std::uint64_t iterations_ = 0;
  DualObserver observer_;
  SamplingStats sampling_;
  double index_cell_ = 1.0;
  bool improved_ = false;

  Cost connection_cost(const TreeConnection& c) const;
  int nearest_in(int tree, const State& source);
  void refresh_best();
  std::vector<int> protected_ids(int tree) const;
};

}  // namespace octoplan
