#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "octoplan/geometry.hpp"
#include "octoplan/random.hpp"
#include "octoplan/sampling.hpp"
#include "octoplan/spatial_hash.hpp"
#include "octoplan/world.hpp"

namespace octoplan {

struct BitTreeConfig {
  /// Samples drawn per batch (m).
  std::size_t batch_size = 100;
  /// Multiplier on the random-geometric-graph connection radius.
  double rgg_eta = 1.1;
  /// Radius of the goal ball around the target, for single-tree goal tests.
  double goal_tolerance = 0.0;
};

/// Result of popping one edge from the edge queue.
enum class EdgeOutcome {
  QueueEmpty,     // nothing to pop
  BatchComplete,  // best edge could not beat the incumbent; both queues emptied
  Skipped,        // heuristic could not improve the target's cost-to-come
  Rejected,       // true edge cost (collision or cost) failed the cascade
  Added,          // target moved from the sample set into the tree
  Rewired,        // target was a tree vertex and got a cheaper parent
};

struct EdgeResult {
  EdgeOutcome outcome = EdgeOutcome::QueueEmpty;
  int from = -1;
  int to = -1;
};

/// One BIT* search tree rooted at `root`, searching toward `target`, together
/// with its sample set, vertex/edge queues and batch machinery. The incumbent
/// cost is owned by the caller and passed to every operation, so the same
/// engine serves as a stand-alone planner and as either tree of a
/// bidirectional search.
class BitSearchTree {
 public:
  struct Node {
    State x;
    Cost g = Cost::infinite();
    Cost g_hat;
    Cost h_hat;
    int parent = -1;
    std::vector<int> children;
    bool alive = true;
    bool in_tree = false;
    bool unexpanded = false;
    bool goal_region = false;
    std::uint64_t vertex_seq = 0;
  };

  struct StepResult {
    bool new_batch = false;
    std::vector<State> samples;  // states drawn by the batch, before validity filtering
    std::size_t expansions = 0;
    EdgeResult edge;
  };

  /// The root becomes the first vertex and the target the first sample.
  BitSearchTree(State root, State target, const ValidityChecker& checker, BitTreeConfig cfg = {});

  BitSearchTree(const BitSearchTree&) = delete;
  BitSearchTree& operator=(const BitSearchTree&) = delete;

  static constexpr int kRootId = 0;
  static constexpr int kTargetId = 1;

  const State& root() const noexcept { return nodes_[kRootId].x; }
  const State& target() const noexcept { return nodes_[kTargetId].x; }
  const BitTreeConfig& config() const noexcept { return cfg_; }

  const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  /// Tree vertices in insertion order.
  const std::vector<int>& vertices() const noexcept { return vertices_; }
  /// Unconnected samples (x_unconn).
  const std::vector<int>& samples() const noexcept { return samples_; }

  Cost g_hat(const State& x) const;
  Cost h_hat(const State& x) const;
  Cost c_hat(const State& a, const State& b) const { return distance(a, b); }
  Cost f_hat(const State& x) const { return g_hat(x) + h_hat(x); }

  Cost best_vertex_value() const noexcept;
  Cost best_edge_value() const noexcept;
  std::size_t vertex_queue_size() const noexcept { return vertex_queue_.size(); }
  std::size_t edge_queue_size() const noexcept { return edge_queue_.size(); }
  bool queues_empty() const noexcept { return vertex_queue_.empty() && edge_queue_.empty(); }
  void clear_queues();

  /// Connection radius used by expansions in the current batch.
  double radius() const noexcept { return radius_; }
  std::uint64_t batches() const noexcept { return batches_; }

  /// Prune, draw m samples, refill the vertex queue with every vertex and
  /// mark every vertex unexpanded. Returns the drawn states.
  std::vector<State> start_new_batch(Cost c_i, RandomSource& rng,
                                     const std::vector<int>& protected_ids = {},
                                     SamplingStats* stats = nullptr);

  /// Drops samples and vertices that cannot beat c_i. Removed vertices whose
  /// f_hat still admits them return to the sample set; their ids are returned.
  /// Vertices listed in protected_ids (and with them their root paths) stay.
  std::vector<int> prune(Cost c_i, const std::vector<int>& protected_ids = {});

  /// Pops the best vertex and queues its promising outgoing edges.
  /// Throws std::logic_error on an empty vertex queue.
  void expand_next_vertex(Cost c_i);

  /// Pops the best edge and runs the lazy evaluation cascade.
  EdgeResult process_best_edge(Cost c_i);

  /// One search step: refill when both queues are empty, expand while the best
  /// vertex is no worse than the best edge, then process one edge.
  StepResult step(Cost c_i, RandomSource& rng, const std::vector<int>& protected_ids = {},
                  SamplingStats* stats = nullptr);

  /// Cheapest tree vertex whose state lies in the goal ball, if any.
  std::optional<int> best_goal_vertex() const;

  /// Root-to-vertex state chain.
  std::vector<State> path_to(int id) const;
  /// Vertex ids on the root-to-vertex chain.
  std::vector<int> chain_ids(int id) const;

  /// Empty when the tree invariants hold, otherwise a description.
  std::string check_consistency(double tol = 1e-9) const;

  // Low-level hooks for seeding and white-box tests.
  int add_sample(const State& x);
  /// Moves a sample into the tree as a child of `parent` with the true edge cost.
  void attach(int sample_id, int parent_id);
  void enqueue_vertex(int id);
  /// Queues (from, to) if its key beats c_i; returns whether it was queued.
  bool enqueue_edge(int from, int to, Cost c_i);
  void set_radius(double r);

 private:
  struct VertexEntry {
    double key;
    double g;
    std::uint64_t seq;
    int id;
    auto operator<=>(const VertexEntry&) const = default;
  };
  struct EdgeEntry {
    double key;
    double g;
    std::uint64_t seq;
    int from;
    int to;
    auto operator<=>(const EdgeEntry&) const = default;
  };

  const ValidityChecker& checker_;
  BitTreeConfig cfg_;
  std::vector<Node> nodes_;
  std::vector<int> vertices_;
  std::vector<int> samples_;
  std::vector<int> goal_vertices_;

  std::set<VertexEntry> vertex_queue_;
  std::set<EdgeEntry> edge_queue_;
  std::vector<std::optional<VertexEntry>> queued_vertex_;
  std::vector<std::vector<EdgeEntry>> queued_edges_;
  std::vector<int> touched_;
  std::uint64_t queue_seq_ = 0;
  std::uint64_t vertex_seq_ = 0;

  SpatialHash neighbors_;
  bool neighbors_dirty_ = true;
  std::size_t indexed_ = 0;
  std::vector<std::pair<int, double>> near_;
  double radius_ = 0.0;
  std::uint64_t batches_ = 0;

  int new_node(const State& x);
  void make_vertex(int id);
  void set_g(int id, Cost g);
  void reparent(int child, int parent, Cost edge_cost);
  void rebuild_neighbors();
  void update_radius(Cost c_i);
  Node& mut(int id) { return nodes_[static_cast<std::size_t>(id)]; }
};

}  // namespace octoplan
