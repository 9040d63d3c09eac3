#include "octoplan/bit_tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace octoplan {

BitSearchTree::BitSearchTree(State root, State target, const ValidityChecker& checker,
                             BitTreeConfig cfg)
    : checker_(checker), cfg_(cfg) {
  if (cfg_.batch_size < 1) throw std::invalid_argument("BitSearchTree: batch size must be >= 1");
  if (!(cfg_.rgg_eta > 0.0)) throw std::invalid_argument("BitSearchTree: rgg_eta must be > 0");
  if (cfg_.goal_tolerance < 0.0) {
    throw std::invalid_argument("BitSearchTree: goal tolerance must be >= 0");
  }
  if (root.dim() != target.dim() || root.dim() != checker.world().dim()) {
    throw std::invalid_argument("BitSearchTree: root/target/world dimension mismatch");
  }
  // Ids are fixed: root 0, target 1.
  nodes_.reserve(2 + cfg_.batch_size);
  for (const State& x : {root, target}) {
    Node n;
    n.x = x;
    nodes_.push_back(std::move(n));
    queued_vertex_.emplace_back();
    queued_edges_.emplace_back();
  }
  for (auto& n : nodes_) {
    n.g_hat = g_hat(n.x);
    n.h_hat = h_hat(n.x);
  }
  make_vertex(kRootId);
  set_g(kRootId, Cost::zero());
  samples_.push_back(kTargetId);
}

int BitSearchTree::new_node(const State& x) {
  Node n;
  n.x = x;
  n.g_hat = g_hat(x);
  n.h_hat = h_hat(x);
  nodes_.push_back(std::move(n));
  queued_vertex_.emplace_back();
  queued_edges_.emplace_back();
  neighbors_dirty_ = true;
  return static_cast<int>(nodes_.size() - 1);
}

Cost BitSearchTree::g_hat(const State& x) const { return distance(nodes_[kRootId].x, x); }

Cost BitSearchTree::h_hat(const State& x) const {
  const double d = distance(x, nodes_[kTargetId].x).value() - cfg_.goal_tolerance;
  return Cost(std::max(0.0, d));
}

void BitSearchTree::make_vertex(int id) {
  Node& n = mut(id);
  n.in_tree = true;
  n.unexpanded = true;
  n.vertex_seq = vertex_seq_++;
  n.goal_region = distance(n.x, target()).value() <= cfg_.goal_tolerance;
  vertices_.push_back(id);
  if (n.goal_region) goal_vertices_.push_back(id);
}

Cost BitSearchTree::best_vertex_value() const noexcept {
  return vertex_queue_.empty() ? Cost::infinite() : Cost(vertex_queue_.begin()->key);
}

Cost BitSearchTree::best_edge_value() const noexcept {
  return edge_queue_.empty() ? Cost::infinite() : Cost(edge_queue_.begin()->key);
}

void BitSearchTree::clear_queues() {
  vertex_queue_.clear();
  edge_queue_.clear();
  for (int id : touched_) {
    queued_vertex_[static_cast<std::size_t>(id)].reset();
    queued_edges_[static_cast<std::size_t>(id)].clear();
  }
  touched_.clear();
}

void BitSearchTree::enqueue_vertex(int id) {
  const Node& n = node(id);
  if (!n.in_tree) throw std::logic_error("enqueue_vertex: not a tree vertex");
  auto& slot = queued_vertex_[static_cast<std::size_t>(id)];
  if (slot) vertex_queue_.erase(*slot);
  VertexEntry e{(n.g + n.h_hat).value(), n.g.value(), queue_seq_++, id};
  vertex_queue_.insert(e);
  slot = e;
  touched_.push_back(id);
}

bool BitSearchTree::enqueue_edge(int from, int to, Cost c_i) {
  const Node& v = node(from);
  const Node& x = node(to);
  const Cost key = v.g + c_hat(v.x, x.x) + x.h_hat;
  if (!(key < c_i)) return false;
  EdgeEntry e{key.value(), v.g.value(), queue_seq_++, from, to};
  edge_queue_.insert(e);
  queued_edges_[static_cast<std::size_t>(from)].push_back(e);
  touched_.push_back(from);
  return true;
}

void BitSearchTree::set_g(int id, Cost g) {
  Node& n = mut(id);
  n.g = g;
  const auto idx = static_cast<std::size_t>(id);
  if (auto& slot = queued_vertex_[idx]) {
    if (vertex_queue_.erase(*slot) > 0) {
      VertexEntry e{(n.g + n.h_hat).value(), n.g.value(), slot->seq, id};
      vertex_queue_.insert(e);
      slot = e;
    } else {
      slot.reset();
    }
  }
  auto& out = queued_edges_[idx];
  std::size_t keep = 0;
  for (auto& e : out) {
    if (edge_queue_.erase(e) == 0) continue;  // already popped
    const Node& x = nodes_[static_cast<std::size_t>(e.to)];
    EdgeEntry updated{(n.g + c_hat(n.x, x.x) + x.h_hat).value(), n.g.value(), e.seq, e.from, e.to};
    edge_queue_.insert(updated);
    out[keep++] = updated;
  }
  out.resize(keep);
}

void BitSearchTree::reparent(int child, int parent, Cost edge_cost) {
  Node& c = mut(child);
  if (c.parent >= 0) {
    auto& siblings = mut(c.parent).children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), child));
  }
  c.parent = parent;
  mut(parent).children.push_back(child);
  set_g(child, nodes_[static_cast<std::size_t>(parent)].g + edge_cost);
  // Eager propagation through the subtree.
  std::vector<int> stack(c.children.begin(), c.children.end());
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    const Node& p = nodes_[static_cast<std::size_t>(n.parent)];
    set_g(id, p.g + distance(p.x, n.x));
    const Node& updated = nodes_[static_cast<std::size_t>(id)];
    stack.insert(stack.end(), updated.children.begin(), updated.children.end());
  }
}

int BitSearchTree::add_sample(const State& x) {
  if (x.dim() != root().dim()) throw std::invalid_argument("add_sample: dimension mismatch");
  const int id = new_node(x);
  samples_.push_back(id);
  return id;
}

void BitSearchTree::attach(int sample_id, int parent_id) {
  const Node& s = node(sample_id);
  const Node& p = node(parent_id);
  if (s.in_tree || !s.alive) throw std::logic_error("attach: not an unconnected sample");
  if (!p.in_tree) throw std::logic_error("attach: parent is not a tree vertex");
  samples_.erase(std::find(samples_.begin(), samples_.end(), sample_id));
  make_vertex(sample_id);
  reparent(sample_id, parent_id, distance(p.x, s.x));
}

void BitSearchTree::set_radius(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("set_radius: radius must be positive");
  radius_ = r;
  neighbors_dirty_ = true;
}

void BitSearchTree::rebuild_neighbors() {
  // Node ids only grow and dead nodes are skipped at query time, so the index
  // is extended in place unless the radius has drifted far from the cell size
  // or most indexed nodes are dead.
  const double want = std::isfinite(radius_) ? std::max(radius_, 1e-6) : 1.0;
  const double ratio = want / neighbors_.cell_size();
  if (indexed_ == 0 || ratio > 2.0 || ratio < 0.25 ||
      2 * (vertices_.size() + samples_.size()) < neighbors_.size()) {
    neighbors_.reset(want);
    indexed_ = 0;
  }
  for (; indexed_ < nodes_.size(); ++indexed_) {
    if (nodes_[indexed_].alive) neighbors_.insert(static_cast<int>(indexed_), nodes_[indexed_].x);
  }
  neighbors_dirty_ = false;
}

void BitSearchTree::update_radius(Cost c_i) {
  const auto n = static_cast<double>(root().dim());
  const double q = std::max(2.0, static_cast<double>(vertices_.size() + samples_.size()));
  const double lambda =
      sampling_domain_measure(checker_.world().bounds(), root(), target(), c_i);
  const double zeta = unit_ball_measure(root().dim());
  const double gamma = 2.0 * std::pow((1.0 + 1.0 / n) * (lambda / zeta), 1.0 / n);
  radius_ = cfg_.rgg_eta * gamma * std::pow(std::log(q) / q, 1.0 / n);
  if (!(radius_ > 0.0)) radius_ = std::numeric_limits<double>::min();
  neighbors_dirty_ = true;
}

std::vector<int> BitSearchTree::prune(Cost c_i, const std::vector<int>& protected_ids) {
  std::vector<int> reuse;
  if (!c_i.is_finite()) return reuse;

  std::unordered_set<int> keep;
  for (int id : protected_ids) {
    for (int a : chain_ids(id)) keep.insert(a);
  }

  std::vector<int> samples;
  samples.reserve(samples_.size());
  for (int id : samples_) {
    Node& s = mut(id);
    if (s.g_hat + s.h_hat > c_i && id != kTargetId) {
      s.alive = false;
    } else {
      samples.push_back(id);
    }
  }

  // Top-down so that a dropped vertex takes its whole subtree with it.
  std::vector<int> order{kRootId};
  std::vector<char> drop(nodes_.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int id = order[i];
    for (int c : nodes_[static_cast<std::size_t>(id)].children) {
      const Node& n = nodes_[static_cast<std::size_t>(c)];
      const bool must_drop =
          drop[static_cast<std::size_t>(id)] || (!keep.contains(c) && n.g + n.h_hat > c_i);
      drop[static_cast<std::size_t>(c)] = must_drop ? 1 : 0;
      order.push_back(c);
    }
  }

  std::vector<int> vertices;
  vertices.reserve(vertices_.size());
  for (int id : vertices_) {
    if (!drop[static_cast<std::size_t>(id)]) {
      vertices.push_back(id);
      continue;
    }
    Node& n = mut(id);
    n.in_tree = false;
    n.unexpanded = false;
    n.goal_region = false;
    n.g = Cost::infinite();
    n.parent = -1;
    n.children.clear();
    if (n.g_hat + n.h_hat <= c_i || id == kTargetId) {
      reuse.push_back(id);
      samples.push_back(id);
    } else {
      n.alive = false;
    }
  }
  // Detach survivors from dropped children.
  for (int id : vertices) {
    auto& ch = mut(id).children;
    std::erase_if(ch, [&](int c) { return drop[static_cast<std::size_t>(c)] != 0; });
  }
  std::erase_if(goal_vertices_, [&](int id) { return drop[static_cast<std::size_t>(id)] != 0; });
  vertices_ = std::move(vertices);
  samples_ = std::move(samples);
  neighbors_dirty_ = true;
  return reuse;
}

std::vector<State> BitSearchTree::start_new_batch(Cost c_i, RandomSource& rng,
                                                  const std::vector<int>& protected_ids,
                                                  SamplingStats* stats) {
  clear_queues();
  prune(c_i, protected_ids);
  std::vector<State> drawn = sample_batch(cfg_.batch_size, root(), target(), c_i,
                                          checker_.world().bounds(), rng, stats);
  for (const State& x : drawn) {
    if (checker_.state_valid(x)) samples_.push_back(new_node(x));
  }
  for (int id : vertices_) {
    mut(id).unexpanded = true;
    enqueue_vertex(id);
  }
  update_radius(c_i);
  ++batches_;
  return drawn;
}

void BitSearchTree::expand_next_vertex(Cost c_i) {
  if (vertex_queue_.empty()) throw std::logic_error("expand_next_vertex: empty vertex queue");
  const VertexEntry top = *vertex_queue_.begin();
  vertex_queue_.erase(vertex_queue_.begin());
  queued_vertex_[static_cast<std::size_t>(top.id)].reset();
  if (neighbors_dirty_) rebuild_neighbors();

  const int v = top.id;
  const Node& vn = nodes_[static_cast<std::size_t>(v)];
  const bool rewire = vn.unexpanded;
  near_.clear();
  neighbors_.for_each_within(vn.x, radius_, [&](int id, double d2) {
    if (id != v) near_.emplace_back(id, d2);
  });
  for (const auto& [x, d2] : near_) {
    const Node& xn = nodes_[static_cast<std::size_t>(x)];
    if (!xn.alive) continue;
    const Cost c(std::sqrt(d2));
    if (!xn.in_tree) {
      if (vn.g_hat + c + xn.h_hat < c_i) enqueue_edge(v, x, c_i);
    } else if (rewire) {
      if (vn.g_hat + c + xn.h_hat < c_i && vn.g + c < xn.g) enqueue_edge(v, x, c_i);
    }
  }
  mut(v).unexpanded = false;
}

EdgeResult BitSearchTree::process_best_edge(Cost c_i) {
  EdgeResult result;
  if (edge_queue_.empty()) return result;
  const EdgeEntry top = *edge_queue_.begin();
  edge_queue_.erase(edge_queue_.begin());
  result.from = top.from;
  result.to = top.to;

  const Node& v = nodes_[static_cast<std::size_t>(top.from)];
  const Node& x = nodes_[static_cast<std::size_t>(top.to)];
  const Cost c_est = c_hat(v.x, x.x);
  if (!(v.g + c_est + x.h_hat < c_i)) {
    clear_queues();
    result.outcome = EdgeOutcome::BatchComplete;
    return result;
  }
  if (!(v.g + c_est < x.g)) {
    result.outcome = EdgeOutcome::Skipped;
    return result;
  }
  const Cost c_edge = checker_.motion_valid(v.x, x.x) ? c_est : Cost::infinite();
  if (!(v.g + c_edge + x.h_hat < c_i && v.g + c_edge < x.g)) {
    result.outcome = EdgeOutcome::Rejected;
    return result;
  }
  if (x.in_tree) {
    result.outcome = EdgeOutcome::Rewired;
  } else {
    samples_.erase(std::find(samples_.begin(), samples_.end(), top.to));
    make_vertex(top.to);
    result.outcome = EdgeOutcome::Added;
  }
  reparent(top.to, top.from, c_edge);
  if (result.outcome == EdgeOutcome::Added) enqueue_vertex(top.to);
  return result;
}

BitSearchTree::StepResult BitSearchTree::step(Cost c_i, RandomSource& rng,
                                              const std::vector<int>& protected_ids,
                                              SamplingStats* stats) {
  StepResult out;
  if (queues_empty()) {
    out.samples = start_new_batch(c_i, rng, protected_ids, stats);
    out.new_batch = true;
  }
  while (!vertex_queue_.empty() && best_vertex_value() <= best_edge_value()) {
    expand_next_vertex(c_i);
    ++out.expansions;
  }
  out.edge = process_best_edge(c_i);
  return out;
}

std::optional<int> BitSearchTree::best_goal_vertex() const {
  std::optional<int> best;
  for (int id : goal_vertices_) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!best || n.g < nodes_[static_cast<std::size_t>(*best)].g) best = id;
  }
  return best;
}

std::vector<int> BitSearchTree::chain_ids(int id) const {
  std::vector<int> ids;
  for (int cur = id; cur >= 0; cur = nodes_.at(static_cast<std::size_t>(cur)).parent) {
    ids.push_back(cur);
    if (ids.size() > nodes_.size()) throw std::logic_error("chain_ids: cycle in tree");
  }
  std::reverse(ids.begin(), ids.end());
  return ids;
}

std::vector<State> BitSearchTree::path_to(int id) const {
  if (!node(id).in_tree) throw std::logic_error("path_to: not a tree vertex");
  std::vector<State> states;
  for (int a : chain_ids(id)) states.push_back(nodes_[static_cast<std::size_t>(a)].x);
  return states;
}

std::string BitSearchTree::check_consistency(double tol) const {
  std::ostringstream err;
  if (nodes_[kRootId].g != Cost::zero()) err << "root g != 0; ";
  std::unordered_set<int> in_v(vertices_.begin(), vertices_.end());
  for (int id : samples_) {
    if (in_v.contains(id)) err << "sample " << id << " is also a vertex; ";
    if (nodes_[static_cast<std::size_t>(id)].in_tree) err << "sample " << id << " flagged in tree; ";
  }
  for (int id : vertices_) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.in_tree || !n.alive) err << "vertex " << id << " not live; ";
    if (id == kRootId) continue;
    if (n.parent < 0 || !in_v.contains(n.parent)) {
      err << "vertex " << id << " has no live parent; ";
      continue;
    }
    // Walk to the root; a cycle would exceed the vertex count.
    Cost sum = Cost::zero();
    std::size_t hops = 0;
    int cur = id;
    while (cur != kRootId && hops <= vertices_.size()) {
      const Node& c = nodes_[static_cast<std::size_t>(cur)];
      sum += distance(nodes_[static_cast<std::size_t>(c.parent)].x, c.x);
      cur = c.parent;
      ++hops;
    }
    if (cur != kRootId) {
      err << "vertex " << id << " is on a cycle; ";
      continue;
    }
    if (std::abs(sum.value() - n.g.value()) > tol * std::max(1.0, sum.value())) {
      err << "vertex " << id << " g=" << n.g.value() << " but path sum=" << sum.value() << "; ";
    }
    const auto& siblings = nodes_[static_cast<std::size_t>(n.parent)].children;
    if (std::count(siblings.begin(), siblings.end(), id) != 1) {
      err << "vertex " << id << " missing from parent's children; ";
    }
  }
  return err.str();
}

}  // namespace octoplan
