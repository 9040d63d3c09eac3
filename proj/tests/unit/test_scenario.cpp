#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "octoplan/grid_oracle.hpp"
#include "octoplan/octree.hpp"

using namespace octoplan;
using namespace octoplan::test;

namespace {

std::string field_of(const std::string& text) {
  try {
    (void)parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.field();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("minimal scenario") {
  const Scenario s = parse_scenario(R"({
    "name": "tiny", "dimension": 2,
    "bounds": {"min": [0, 0], "max": [2, 1]},
    "start": [0.1, 0.1], "goal": [1.9, 0.9]
  })");
  CHECK(s.name == "tiny");
  CHECK(s.dimension == 2);
  CHECK(s.obstacles.empty());
  CHECK(s.goal_tolerance == 0.0);
  CHECK(s.robot_radius == 0.0);
  CHECK_FALSE(s.sensor_height);
  CHECK_FALSE(s.map_path);
  CHECK(s.world->kind() == World::Kind::Analytic);
  CHECK(s.problem().x_goal == State{1.9, 0.9});
  const Scenario r = reversed(s);
  CHECK(r.start == s.goal);
  CHECK(r.goal == s.start);
}

TEST_CASE("shipped scenarios load") {
  for (const char* name : {"free2d", "wall2d", "bugtrap2d", "corridor3d", "lab3d"}) {
    CAPTURE(name);
    const Scenario s = load_scenario(scenario_path(name));
    CHECK(s.name == name);
    CHECK(s.world->bounds().contains(s.start));
    CHECK(s.world->bounds().contains(s.goal));
  }
  const Scenario lab = load_scenario(scenario_path("lab3d"));
  CHECK(lab.world->kind() == World::Kind::Octree);
  CHECK(lab.map_path->is_absolute());
  REQUIRE(lab.sensor_height);
  CHECK(*lab.sensor_height == doctest::Approx(0.3));
}

TEST_CASE("shipped scenarios are feasible") {
  for (const char* name : {"free2d", "wall2d", "bugtrap2d", "corridor3d", "lab3d"}) {
    CAPTURE(name);
    const Scenario s = load_scenario(scenario_path(name));
    const auto oracle = grid_oracle(s, 0.02);
    CHECK(oracle.cost.is_finite());
    CHECK(oracle.cost.value() >= distance(s.start, s.goal).value());
  }
}

TEST_CASE("map scenario without bounds uses the map cube") {
  OccupancyOctree map(0.1, 4);
  for (double x = -0.75; x < 0.8; x += 0.1)
    for (double y = -0.75; y < 0.8; y += 0.1)
      for (double z = -0.75; z < 0.8; z += 0.1) map.set_log_odds(*map.key_of(State{x, y, z}), -2.0);
  const auto dir = std::filesystem::temp_directory_path() / "octoplan_scenario_test";
  std::filesystem::create_directories(dir);
  map.save(dir / "cube.vox");
  const Scenario s = parse_scenario(R"({
    "name": "cube", "dimension": 3, "map": "cube.vox",
    "start": [-0.5, -0.5, 0.0], "goal": [0.5, 0.5, 0.0]
  })",
                                    dir);
  CHECK(s.bounds.min() == State{-0.8, -0.8, -0.8});
  CHECK(s.bounds.max() == State{0.8, 0.8, 0.8});
  CHECK(s.world->kind() == World::Kind::Octree);
  CHECK(*s.map_path == dir / "cube.vox");
  std::filesystem::remove_all(dir);
}

TEST_CASE("invalid start or goal is rejected") {
  const std::string in_box = R"({
    "name": "bad", "dimension": 2,
    "bounds": {"min": [0, 0], "max": [1, 1]},
    "obstacles": [{"type": "box", "center": [0.5, 0.5], "extent": [0.2, 0.2]}],
    "start": [0.5, 0.5], "goal": [0.9, 0.9]
  })";
  CHECK_THROWS_AS((void)parse_scenario(in_box), InvalidProblem);
  const std::string outside = R"({
    "name": "bad", "dimension": 2, "bounds": {"min": [0, 0], "max": [1, 1]},
    "start": [0.5, 0.5], "goal": [1.5, 0.9]
  })";
  CHECK_THROWS_AS((void)parse_scenario(outside), InvalidProblem);
}

TEST_CASE("malformed fields are named") {
  const std::string head = R"("name": "x", "dimension": 2, "bounds": {"min": [0, 0], "max": [1, 1]},)";
  CHECK(field_of("{" + head + R"("goal": [0.9, 0.9]})") == "start");
  CHECK(field_of("{" + head + R"("start": [0.1], "goal": [0.9, 0.9]})") == "start");
  CHECK(field_of("{" + head + R"("start": [0.1, 0.1], "goal": [0.9, "a"]})") == "goal[1]");
  CHECK(field_of(R"({"name": "x", "dimension": 4, "start": [0], "goal": [0]})") == "dimension");
  CHECK(field_of(R"({"dimension": 2})") == "name");
  CHECK(field_of(R"({"name": "x", "dimension": 2, "start": [0.1, 0.1], "goal": [0.9, 0.9]})") ==
        "bounds");
  CHECK(field_of("{" + head +
                 R"("obstacles": [{"type": "cone", "center": [0.5, 0.5]}],
                    "start": [0.1, 0.1], "goal": [0.9, 0.9]})") == "obstacles[0].type");
  CHECK(field_of("{" + head +
                 R"("obstacles": [{"type": "ball", "center": [0.5, 0.5], "radius": -1}],
                    "start": [0.1, 0.1], "goal": [0.9, 0.9]})") == "obstacles[0].radius");
  CHECK(field_of("{" + head + R"("start": [0.1, 0.1], "goal": [0.9, 0.9], "robot_radius": -0.1})") ==
        "robot_radius");
  CHECK_THROWS_AS((void)parse_scenario("{ not json"), std::exception);
}

TEST_CASE("map and obstacles are mutually exclusive") {
  CHECK(field_of(R"({"name": "x", "dimension": 3, "map": "m.vox", "obstacles": [],
                     "start": [0, 0, 0], "goal": [1, 1, 1]})") == "map");
  CHECK(field_of(R"({"name": "x", "dimension": 2, "map": "m.vox",
                     "start": [0, 0], "goal": [1, 1]})") == "map");
  CHECK(field_of(R"({"name": "x", "dimension": 3, "map": "does-not-exist.vox",
                     "start": [0, 0, 0], "goal": [1, 1, 1]})") == "map");
}
