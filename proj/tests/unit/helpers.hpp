#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "octoplan/geometry.hpp"
#include "octoplan/planner.hpp"
#include "octoplan/scenario.hpp"
#include "octoplan/world.hpp"

namespace octoplan::test {

inline std::filesystem::path scenario_path(const std::string& name) {
  return std::filesystem::path(OCTOPLAN_SCENARIO_DIR) / (name + ".json");
}

inline std::shared_ptr<const World> analytic_world(Bounds b, std::vector<Obstacle> obs = {}) {
  return std::make_shared<const World>(World::analytic(std::move(b), std::move(obs)));
}

inline PlannerProblem problem_in(std::shared_ptr<const World> world, State start, State goal,
                                 double radius = 0.0) {
  PlannerProblem p;
  p.validity = world->default_validity();
  p.world = std::move(world);
  p.shape.radius = radius;
  p.x_start = start;
  p.x_goal = goal;
  return p;
}

/// Segment-by-segment recheck at a finer step than the planner used.
inline bool path_valid(const PlannerProblem& p, const Path& path, double refine = 2.0) {
  ValidityConfig cfg = p.validity;
  cfg.check_resolution /= refine;
  for (std::size_t i = 0; i + 1 < path.states.size(); ++i) {
    if (!is_motion_valid(*p.world, p.shape, cfg, path.states[i], path.states[i + 1])) return false;
  }
  return path.states.size() >= 2;
}

}  // namespace octoplan::test
