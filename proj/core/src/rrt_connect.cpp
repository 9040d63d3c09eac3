#include "octoplan/rrt_connect.hpp"

#include <algorithm>

#include "octoplan/sampling.hpp"

namespace octoplan {

RrtConnectPlanner::RrtConnectPlanner(PlannerProblem problem, std::uint64_t seed,
                                     RrtConnectConfig cfg)
    : problem_((validate_problem(problem), std::move(problem))),
      rng_(seed),
      checker_(problem_.world, problem_.shape, problem_.validity),
      step_(cfg.step_size.value_or(0.05 * problem_.world->bounds().diagonal())) {
  if (!(step_ > 0.0) || !std::isfinite(step_)) {
    throw InvalidProblem("RRT-Connect step size must be positive");
  }
  const State roots[2] = {problem_.x_start, problem_.x_goal};
  for (int t = 0; t < 2; ++t) {
    trees_[t].index.reset(step_);
    trees_[t].nodes.push_back(Node{roots[t], -1});
    trees_[t].index.insert(0, roots[t]);
  }
}

RrtConnectPlanner::Growth RrtConnectPlanner::extend(Tree& tree, const State& toward,
                                                    int& new_id) {
  const int near = *tree.index.nearest(toward);
  const State from = tree.nodes[static_cast<std::size_t>(near)].x;
  const double d = distance(from, toward).value();
  const bool reaches = d <= step_;
  const State to = reaches ? toward : interpolate(from, toward, step_ / d);
  if (!checker_.motion_valid(from, to)) return Growth::Trapped;
  if (d == 0.0) {
    new_id = near;
    return Growth::Reached;
  }
  new_id = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back(Node{to, near});
  tree.index.insert(new_id, to);
  return reaches ? Growth::Reached : Growth::Advanced;
}

RrtConnectPlanner::Growth RrtConnectPlanner::connect(Tree& tree, const State& toward,
                                                     int& new_id) {
  Growth g = Growth::Advanced;
  while (g == Growth::Advanced) g = extend(tree, toward, new_id);
  return g;
}

std::vector<State> RrtConnectPlanner::chain(const Tree& tree, int id) const {
  std::vector<State> out;
  for (int cur = id; cur >= 0; cur = tree.nodes[static_cast<std::size_t>(cur)].parent) {
    out.push_back(tree.nodes[static_cast<std::size_t>(cur)].x);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

PlanResult RrtConnectPlanner::plan(const Termination& stop, const SolutionCallback& on_solution) {
  PlanResult result;
  Stopwatch clock;
  std::uint64_t iter = 0;
  int a = 0;  // tree that extends this iteration
  while (iter < stop.max_iterations && clock.elapsed_ms() < stop.time_budget_ms) {
    ++iter;
    // The first extension aims at the other root, so an unobstructed short
    // query resolves in a single iteration.
    const State target = iter == 1 ? trees_[1 - a].nodes.front().x
                                   : sample_uniform(problem_.world->bounds(), rng_);
    int added = -1;
    if (extend(trees_[a], target, added) != Growth::Trapped) {
      const State& q_new = trees_[a].nodes[static_cast<std::size_t>(added)].x;
      int reached = -1;
      if (connect(trees_[1 - a], q_new, reached) == Growth::Reached) {
        std::vector<State> head = chain(trees_[a], added);
        std::vector<State> tail = chain(trees_[1 - a], reached);
        if (a == 1) std::swap(head, tail);
        std::vector<State> states = std::move(head);
        for (auto it = tail.rbegin(); it != tail.rend(); ++it) {
          if (!(states.back() == *it)) states.push_back(*it);
        }
        if (states.size() < 2) states.push_back(states.back());
        Path path{states, path_length(states)};
        SolutionEvent ev{iter, clock.elapsed_ms(), path.cost, path};
        if (on_solution) on_solution(ev);
        result.improvements.push_back(ev);
        result.path = std::move(path);
        break;
      }
    }
    a = 1 - a;
  }
  result.stats.iterations = iter;
  result.stats.state_checks = checker_.state_checks();
  result.stats.motion_checks = checker_.motion_checks();
  result.stats.vertices = trees_[0].nodes.size() + trees_[1].nodes.size();
  result.stats.elapsed_ms = clock.elapsed_ms();
  return result;
}

}  // namespace octoplan
