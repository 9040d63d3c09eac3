#include "octoplan/dual_bit_planner.hpp"

#include <algorithm>
#include <stdexcept>

namespace octoplan {

const char* to_string(ConnectionStrategy s) noexcept {
  return s == ConnectionStrategy::NearestNeighbor ? "nearest" : "random";
}

int strategy_nearest(const State& source, const BitSearchTree& tree) {
  const auto& vs = tree.vertices();
  if (vs.empty()) throw std::logic_error("strategy_nearest: empty tree");
  int best = vs.front();
  double best_d2 = squared_distance(source, tree.node(best).x);
  for (std::size_t i = 1; i < vs.size(); ++i) {
    const double d2 = squared_distance(source, tree.node(vs[i]).x);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = vs[i];
    }
  }
  return best;
}

int strategy_random(const BitSearchTree& tree, RandomSource& rng) {
  const auto& vs = tree.vertices();
  if (vs.empty()) throw std::logic_error("strategy_random: empty tree");
  return vs[rng.draw_index(vs.size())];
}

DualBitPlanner::DualBitPlanner(PlannerProblem problem, std::uint64_t seed, DualBitConfig cfg)
    : problem_((validate_problem(problem), std::move(problem))),
      cfg_(cfg),
      rng_(seed),
      checker_(problem_.world, problem_.shape, problem_.validity) {
  const double p = cfg_.strategy.p_nearest;
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidProblem("strategy probability must lie in [0, 1]");
  BitTreeConfig tc;
  tc.batch_size = cfg_.batch_size;
  tc.rgg_eta = cfg_.rgg_eta;
  trees_[0] = std::make_unique<BitSearchTree>(problem_.x_start, problem_.x_goal, checker_, tc);
  trees_[1] = std::make_unique<BitSearchTree>(problem_.x_goal, problem_.x_start, checker_, tc);
  pending_[0] = BitSearchTree::kRootId;
  pending_[1] = BitSearchTree::kRootId;
  index_cell_ = std::max(1e-6, problem_.world->bounds().diagonal() / 32.0);
}

QueueSizes DualBitPlanner::queue_sizes() const noexcept {
  return QueueSizes{trees_[0]->vertex_queue_size(), trees_[0]->edge_queue_size(),
                    trees_[1]->vertex_queue_size(), trees_[1]->edge_queue_size()};
}

void DualBitPlanner::set_pending(int tree, int vertex_id) {
  const auto t = static_cast<std::size_t>(tree);
  if (t > 1) throw std::invalid_argument("set_pending: tree must be 0 or 1");
  if (!trees_[t]->node(vertex_id).in_tree) {
    throw std::logic_error("set_pending: not a tree vertex");
  }
  pending_[t] = vertex_id;
}

std::vector<int> DualBitPlanner::protected_ids(int tree) const {
  if (!best_) return {};
  return {tree == 0 ? best_->start_vertex : best_->goal_vertex};
}

Cost DualBitPlanner::connection_cost(const TreeConnection& c) const {
  const auto& u = trees_[0]->node(c.start_vertex);
  const auto& w = trees_[1]->node(c.goal_vertex);
  return u.g + distance(u.x, w.x) + w.g;
}

int DualBitPlanner::nearest_in(int tree, const State& source) {
  auto& idx = index_[static_cast<std::size_t>(tree)];
  const BitSearchTree& t = *trees_[static_cast<std::size_t>(tree)];
  const auto& vs = t.vertices();
  if (idx.batch != t.batches() || vs.size() < idx.synced) {
    idx.hash.reset(index_cell_);
    idx.synced = 0;
    idx.batch = t.batches();
  }
  for (; idx.synced < vs.size(); ++idx.synced) {
    idx.hash.insert(vs[idx.synced], t.node(vs[idx.synced]).x);
  }
  return *idx.hash.nearest(source);
}

void DualBitPlanner::refresh_best() {
  if (!best_) return;
  const Cost c = connection_cost(*best_);
  if (c < c_best_) {
    c_best_ = c;
    c_i_ = {c, c};
    improved_ = true;
  }
}

std::vector<ConnectionAttempt> DualBitPlanner::connect_trees() {
  std::vector<ConnectionAttempt> attempts;
  const double draw = rng_.draw_uniform();
  const ConnectionStrategy strategy = draw < cfg_.strategy.p_nearest
                                          ? ConnectionStrategy::NearestNeighbor
                                          : ConnectionStrategy::RandomNode;
  if (observer_.on_strategy_draw) observer_.on_strategy_draw(draw, strategy);

  for (int t = 0; t < 2; ++t) {
    auto& pending = pending_[static_cast<std::size_t>(t)];
    if (!pending) continue;
    const int other = 1 - t;
    const BitSearchTree& mine = *trees_[static_cast<std::size_t>(t)];
    const BitSearchTree& theirs = *trees_[static_cast<std::size_t>(other)];
    ConnectionAttempt a;
    a.strategy = strategy;
    a.from_tree = t;
    a.source_id = *pending;
    pending.reset();
    a.target_id = strategy == ConnectionStrategy::NearestNeighbor
                      ? nearest_in(other, mine.node(a.source_id).x)
                      : strategy_random(theirs, rng_);
    a.source = mine.node(a.source_id).x;
    a.target = theirs.node(a.target_id).x;
    const TreeConnection c = t == 0 ? TreeConnection{a.source_id, a.target_id}
                                    : TreeConnection{a.target_id, a.source_id};
    a.cost = connection_cost(c);
    if (a.cost < c_best_) {
      a.motion_valid = checker_.motion_valid(a.source, a.target);
      if (*a.motion_valid) {
        a.succeeded = true;
        best_ = c;
        c_best_ = a.cost;
        c_i_ = {a.cost, a.cost};
        trees_[0]->clear_queues();
        trees_[1]->clear_queues();
        improved_ = true;
      }
    }
    if (observer_.on_connection) observer_.on_connection(a, queue_sizes());
    attempts.push_back(std::move(a));
  }
  return attempts;
}

void DualBitPlanner::iterate() {
  // Each root is its tree's only vertex before the first step; let the roots
  // attempt the join before either tree grows.
  if (iterations_ == 0 && (pending_[0] || pending_[1])) connect_trees();
  for (int t = 0; t < 2; ++t) {
    auto& tree = *trees_[static_cast<std::size_t>(t)];
    const Cost c_i = c_i_[static_cast<std::size_t>(t)];
    auto step = tree.step(c_i, rng_, protected_ids(t), &sampling_);
    if (step.new_batch && observer_.on_batch) observer_.on_batch(t, step.samples, c_i);
    if (step.edge.outcome == EdgeOutcome::Added) pending_[static_cast<std::size_t>(t)] = step.edge.to;
  }
  refresh_best();
  connect_trees();
  ++iterations_;
  if (observer_.on_iteration) observer_.on_iteration(iterations_);
}

Path DualBitPlanner::extract_solution() const {
  if (!best_) throw std::logic_error("extract_solution: no connection found yet");
  std::vector<State> states = trees_[0]->path_to(best_->start_vertex);
  std::vector<State> back = trees_[1]->path_to(best_->goal_vertex);
  for (auto it = back.rbegin(); it != back.rend(); ++it) {
    if (states.back() == *it) continue;
    states.push_back(*it);
  }
  if (states.size() < 2) states.push_back(states.back());
  return Path{std::move(states), c_best_};
}

PlanResult DualBitPlanner::plan(const Termination& stop, const SolutionCallback& on_solution) {
  PlanResult result;
  Stopwatch clock;
  const std::uint64_t first = iterations_;
  auto done = [&] {
    if (iterations_ - first >= stop.max_iterations) return true;
    if (clock.elapsed_ms() >= stop.time_budget_ms) return true;
    return stop.target_cost && c_best_.value() <= *stop.target_cost;
  };
  while (!done()) {
    improved_ = false;
    iterate();
    if (!improved_) continue;
    SolutionEvent ev;
    ev.iteration = iterations_;
    ev.elapsed_ms = clock.elapsed_ms();
    ev.cost = c_best_;
    ev.path = extract_solution();
    if (on_solution) on_solution(ev);
    result.improvements.push_back(std::move(ev));
  }
  if (best_) result.path = extract_solution();
  result.stats.iterations = iterations_ - first;
  result.stats.batches = trees_[0]->batches() + trees_[1]->batches();
  result.stats.state_checks = checker_.state_checks();
  result.stats.motion_checks = checker_.motion_checks();
  result.stats.vertices = trees_[0]->vertices().size() + trees_[1]->vertices().size();
  result.stats.elapsed_ms = clock.elapsed_ms();
  return result;
}

}  // namespace octoplan
