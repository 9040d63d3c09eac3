#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "octoplan/geometry.hpp"
#include "octoplan/planner.hpp"
#include "octoplan/world.hpp"

namespace octoplan {

/// Malformed scenario document; field() names the offending JSON field.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A benchmark problem: workspace, robot and query.
struct Scenario {
  std::string name;
  std::size_t dimension = 2;
  Bounds bounds;
  std::vector<Obstacle> obstacles;
  /// Absolute path of the referenced .vox map, if any.
  std::optional<std::filesystem::path> map_path;
  State start;
  State goal;
  double goal_tolerance = 0.0;
  double robot_radius = 0.0;
  std::optional<double> sensor_height;

  std::shared_ptr<const World> world;
  ValidityConfig validity;

  PlannerProblem problem() const;
};

/// Parses a scenario document. Map paths resolve against base_dir. Throws
/// ScenarioError for malformed fields and InvalidProblem for an invalid
/// start or goal.
Scenario parse_scenario(const std::string& json_text,
                        const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// A copy of the scenario with start and goal exchanged.
Scenario reversed(const Scenario& s);

}  // namespace octoplan
