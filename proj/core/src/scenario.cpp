#include "octoplan/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace octoplan {

using nlohmann::json;

ScenarioError::ScenarioError(std::string field, const std::string& message)
    : std::runtime_error("scenario field '" + field + "': " + message), field_(std::move(field)) {}

PlannerProblem Scenario::problem() const {
  PlannerProblem p;
  p.world = world;
  p.shape = RobotShape{robot_radius};
  p.validity = validity;
  p.x_start = start;
  p.x_goal = goal;
  p.goal_tolerance = goal_tolerance;
  return p;
}

namespace {

const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(path + key, "missing");
  return *it;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ScenarioError(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ScenarioError(field, "must be finite");
  return d;
}

double non_negative(const json& v, const std::string& field) {
  const double d = number(v, field);
  if (d < 0.0) throw ScenarioError(field, "must be non-negative");
  return d;
}

State vec(const json& v, std::size_t dim, const std::string& field) {
  if (!v.is_array()) throw ScenarioError(field, "expected an array");
  if (v.size() != dim) {
    throw ScenarioError(field, "expected " + std::to_string(dim) + " components, got " +
                                   std::to_string(v.size()));
  }
  std::vector<double> c;
  for (std::size_t i = 0; i < v.size(); ++i) {
    c.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  }
  return State(std::span<const double>(c));
}

Obstacle obstacle(const json& o, std::size_t dim, const std::string& path) {
  if (!o.is_object()) throw ScenarioError(path, "expected an object");
  const json& type = require(o, "type", path + ".");
  if (!type.is_string()) throw ScenarioError(path + ".type", "expected a string");
  const State center = vec(require(o, "center", path + "."), dim, path + ".center");
  const std::string t = type.get<std::string>();
  if (t == "box") {
    State extent = vec(require(o, "extent", path + "."), dim, path + ".extent");
    for (std::size_t i = 0; i < dim; ++i) {
      if (extent[i] < 0.0) throw ScenarioError(path + ".extent", "must be non-negative");
    }
    return BoxObstacle{center, extent};
  }
  if (t == "ball") {
    return BallObstacle{center, non_negative(require(o, "radius", path + "."), path + ".radius")};
  }
  throw ScenarioError(path + ".type", "unknown obstacle type '" + t + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<document>", e.what());
  }
  if (!doc.is_object()) throw ScenarioError("<document>", "expected a JSON object");

  Scenario s;
  const json& name = require(doc, "name", "");
  if (!name.is_string()) throw ScenarioError("name", "expected a string");
  s.name = name.get<std::string>();

  const json& dim = require(doc, "dimension", "");
  if (!dim.is_number_integer() || (dim.get<int>() != 2 && dim.get<int>() != 3)) {
    throw ScenarioError("dimension", "must be 2 or 3");
  }
  s.dimension = static_cast<std::size_t>(dim.get<int>());

  const bool has_map = doc.contains("map") && !doc["map"].is_null();
  const bool has_obstacles = doc.contains("obstacles") && !doc["obstacles"].is_null();
  if (has_map && has_obstacles) {
    throw ScenarioError("map", "'map' and 'obstacles' are mutually exclusive");
  }

  std::shared_ptr<const OccupancyOctree> map;
  if (has_map) {
    if (!doc["map"].is_string()) throw ScenarioError("map", "expected a path string");
    if (s.dimension != 3) throw ScenarioError("map", "octree maps require dimension 3");
    std::filesystem::path p = doc["map"].get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    s.map_path = p;
    try {
      map = std::make_shared<const OccupancyOctree>(OccupancyOctree::load(p));
    } catch (const std::exception& e) {
      throw ScenarioError("map", e.what());
    }
  }

  if (doc.contains("bounds")) {
    const json& b = doc["bounds"];
    if (!b.is_object()) throw ScenarioError("bounds", "expected an object");
    State lo = vec(require(b, "min", "bounds."), s.dimension, "bounds.min");
    State hi = vec(require(b, "max", "bounds."), s.dimension, "bounds.max");
    try {
      s.bounds = Bounds(lo, hi);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError("bounds", e.what());
    }
  } else if (map) {
    s.bounds = map->cube_bounds();
  } else {
    throw ScenarioError("bounds", "missing");
  }

  if (has_obstacles) {
    const json& obs = doc["obstacles"];
    if (!obs.is_array()) throw ScenarioError("obstacles", "expected an array");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      s.obstacles.push_back(obstacle(obs[i], s.dimension, "obstacles[" + std::to_string(i) + "]"));
    }
  }

  s.start = vec(require(doc, "start", ""), s.dimension, "start");
  s.goal = vec(require(doc, "goal", ""), s.dimension, "goal");
  s.goal_tolerance = doc.contains("goal_tolerance")
                         ? non_negative(doc["goal_tolerance"], "goal_tolerance")
                         : 0.0;
  s.robot_radius =
      doc.contains("robot_radius") ? non_negative(doc["robot_radius"], "robot_radius") : 0.0;
  if (doc.contains("sensor_height") && !doc["sensor_height"].is_null()) {
    s.sensor_height = number(doc["sensor_height"], "sensor_height");
  }

  s.world = std::make_shared<const World>(map ? World::from_octree(s.bounds, map)
                                              : World::analytic(s.bounds, s.obstacles));
  s.validity = s.world->default_validity();
  validate_problem(s.problem());
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.parent_path());
}

Scenario reversed(const Scenario& s) {
  Scenario r = s;
  std::swap(r.start, r.goal);
  return r;
}

}  // namespace octoplan
