#include "octoplan/map_builder.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace octoplan {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw std::runtime_error("map script field '" + field + "': " + msg);
}

double num(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

State vec3(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 3) fail(field, "expected an array of 3 numbers");
  return State{num(v[0], field), num(v[1], field), num(v[2], field)};
}

std::vector<Obstacle> obstacles(const json& arr, const std::string& field) {
  if (!arr.is_array()) fail(field, "expected an array");
  std::vector<Obstacle> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    const json& o = arr[i];
    if (!o.is_object() || !o.contains("type") || !o["type"].is_string()) {
      fail(f + ".type", "missing or not a string");
    }
    if (!o.contains("center")) fail(f + ".center", "missing");
    const State c = vec3(o["center"], f + ".center");
    const std::string t = o["type"].get<std::string>();
    if (t == "box") {
      if (!o.contains("extent")) fail(f + ".extent", "missing");
      out.push_back(BoxObstacle{c, vec3(o["extent"], f + ".extent")});
    } else if (t == "ball") {
      if (!o.contains("radius")) fail(f + ".radius", "missing");
      out.push_back(BallObstacle{c, num(o["radius"], f + ".radius")});
    } else {
      fail(f + ".type", "unknown obstacle type '" + t + "'");
    }
  }
  return out;
}

}  // namespace

std::vector<State> RayFan::directions() const {
  std::vector<State> dirs;
  if (azimuth_steps == 0 || elevation_steps == 0) return dirs;
  dirs.reserve(azimuth_steps * elevation_steps);
  const double deg = std::numbers::pi / 180.0;
  for (std::size_t e = 0; e < elevation_steps; ++e) {
    const double el =
        elevation_steps == 1
            ? elevation_min
            : elevation_min + (elevation_max - elevation_min) * static_cast<double>(e) /
                                  static_cast<double>(elevation_steps - 1);
    const double ce = std::cos(el * deg);
    const double se = std::sin(el * deg);
    for (std::size_t a = 0; a < azimuth_steps; ++a) {
      const double az = 360.0 * static_cast<double>(a) / static_cast<double>(azimuth_steps);
      State d{ce * std::cos(az * deg), ce * std::sin(az * deg), se};
      const double n = std::sqrt(squared_distance(d, State{0, 0, 0}));
      dirs.push_back(d * (1.0 / n));
    }
  }
  return dirs;
}

MapScript parse_map_script(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("<document>", e.what());
  }
  if (!doc.is_object()) fail("<document>", "expected a JSON object");
  MapScript s;
  if (!doc.contains("resolution")) fail("resolution", "missing");
  s.resolution = num(doc["resolution"], "resolution");
  if (!(s.resolution > 0.0)) fail("resolution", "must be positive");
  if (doc.contains("max_depth")) {
    if (!doc["max_depth"].is_number_integer()) fail("max_depth", "expected an integer");
    const int d = doc["max_depth"].get<int>();
    if (d < 1 || d > static_cast<int>(OccupancyOctree::kMaxSupportedDepth)) {
      fail("max_depth", "must lie in [1, 21]");
    }
    s.max_depth = static_cast<unsigned>(d);
  }
  if (!doc.contains("bounds") || !doc["bounds"].is_object()) fail("bounds", "missing");
  const json& b = doc["bounds"];
  if (!b.contains("min") || !b.contains("max")) fail("bounds", "needs min and max");
  try {
    s.bounds = Bounds(vec3(b["min"], "bounds.min"), vec3(b["max"], "bounds.max"));
  } catch (const std::invalid_argument& e) {
    fail("bounds", e.what());
  }
  if (doc.contains("obstacles")) s.obstacles = obstacles(doc["obstacles"], "obstacles");
  if (doc.contains("scans")) {
    const json& scans = doc["scans"];
    if (!scans.is_array()) fail("scans", "expected an array");
    for (std::size_t i = 0; i < scans.size(); ++i) {
      const std::string f = "scans[" + std::to_string(i) + "]";
      const json& sc = scans[i];
      if (!sc.is_object() || !sc.contains("origin")) fail(f + ".origin", "missing");
      ScanPose pose;
      pose.origin = vec3(sc["origin"], f + ".origin");
      if (!s.bounds.contains(pose.origin)) fail(f + ".origin", "pose outside the script bounds");
      if (sc.contains("max_range")) pose.max_range = num(sc["max_range"], f + ".max_range");
      if (!(pose.max_range > 0.0)) fail(f + ".max_range", "must be positive");
      if (sc.contains("fan")) {
        const json& fan = sc["fan"];
        if (!fan.is_object()) fail(f + ".fan", "expected an object");
        auto steps = [&](const char* key, std::size_t& dst) {
          if (!fan.contains(key)) return;
          if (!fan[key].is_number_unsigned()) fail(f + ".fan." + key, "expected a count");
          dst = fan[key].get<std::size_t>();
        };
        steps("azimuth_steps", pose.fan.azimuth_steps);
        steps("elevation_steps", pose.fan.elevation_steps);
        if (fan.contains("elevation_min")) {
          pose.fan.elevation_min = num(fan["elevation_min"], f + ".fan.elevation_min");
        }
        if (fan.contains("elevation_max")) {
          pose.fan.elevation_max = num(fan["elevation_max"], f + ".fan.elevation_max");
        }
      }
      if (sc.contains("obstacles")) pose.obstacles = obstacles(sc["obstacles"], f + ".obstacles");
      s.scans.push_back(std::move(pose));
    }
  }
  const double half = s.resolution * std::ldexp(1.0, static_cast<int>(s.max_depth)) / 2.0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (s.bounds.min()[i] < -half || s.bounds.max()[i] > half) {
      fail("bounds", "outside the addressable map cube");
    }
  }
  return s;
}

MapScript load_map_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open map script " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_map_script(text.str());
}

OccupancyOctree rasterize_obstacles(const std::vector<Obstacle>& obstacles, double resolution,
                                    unsigned max_depth) {
  OccupancyOctree map(resolution, max_depth);
  const double half = map.cube_side() / 2.0;
  const double top = map.params().clamp_max;
  for (const auto& o : obstacles) {
    State lo{0, 0, 0};
    State hi{0, 0, 0};
    std::visit(
        [&](const auto& ob) {
          using T = std::decay_t<decltype(ob)>;
          if (ob.center.dim() != 3) throw std::invalid_argument("rasterize: obstacles must be 3D");
          for (std::size_t i = 0; i < 3; ++i) {
            double r = 0.0;
            if constexpr (std::is_same_v<T, BoxObstacle>) {
              r = ob.extent[i] / 2.0;
            } else {
              r = ob.radius;
            }
            lo = lo.with(i, ob.center[i] - r);
            hi = hi.with(i, ob.center[i] + r);
          }
        },
        o);
    std::int64_t k0[3];
    std::int64_t k1[3];
    const double count = std::ldexp(1.0, static_cast<int>(max_depth));
    for (std::size_t i = 0; i < 3; ++i) {
      k0[i] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((lo[i] + half) / resolution)));
      k1[i] = std::min<std::int64_t>(static_cast<std::int64_t>(count) - 1,
                                     static_cast<std::int64_t>(std::floor((hi[i] + half) / resolution)));
    }
    for (std::int64_t z = k0[2]; z <= k1[2]; ++z) {
      for (std::int64_t y = k0[1]; y <= k1[1]; ++y) {
        for (std::int64_t x = k0[0]; x <= k1[0]; ++x) {
          const State vlo{static_cast<double>(x) * resolution - half,
                          static_cast<double>(y) * resolution - half,
                          static_cast<double>(z) * resolution - half};
          const State vhi = vlo + State{resolution, resolution, resolution};
          const bool hit = std::visit(
              [&](const auto& ob) {
                using T = std::decay_t<decltype(ob)>;
                if constexpr (std::is_same_v<T, BoxObstacle>) {
                  for (std::size_t i = 0; i < 3; ++i) {
                    if (!(vlo[i] < hi[i] && vhi[i] > lo[i])) return false;
                  }
                  return true;
                } else {
                  return squared_distance_to_box(ob.center, vlo, vhi) < ob.radius * ob.radius;
                }
              },
              o);
          if (hit) {
            map.set_log_odds(VoxelKey{static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y),
                                      static_cast<std::uint32_t>(z)},
                             top);
          }
        }
      }
    }
  }
  return map;
}

PosedScan simulate_scan(const OccupancyOctree& truth, const ScanPose& pose) {
  PosedScan scan;
  scan.origin = pose.origin;
  scan.max_range = pose.max_range;
  for (const State& d : pose.fan.directions()) {
    if (auto hit = truth.cast_ray(pose.origin, d, pose.max_range)) {
      scan.points.push_back(*hit);
    } else {
      // Past max_range: the ray only clears space.
      scan.points.push_back(pose.origin + d * (pose.max_range * 1.001));
    }
  }
  return scan;
}

OccupancyOctree build_map(const MapScript& script) {
  OccupancyOctree map(script.resolution, script.max_depth);
  std::optional<OccupancyOctree> shared_truth;
  for (const auto& pose : script.scans) {
    if (pose.obstacles) {
      const OccupancyOctree truth =
          rasterize_obstacles(*pose.obstacles, script.resolution, script.max_depth);
      map.insert_scan(simulate_scan(truth, pose));
    } else {
      if (!shared_truth) {
        shared_truth = rasterize_obstacles(script.obstacles, script.resolution, script.max_depth);
      }
      map.insert_scan(simulate_scan(*shared_truth, pose));
    }
  }
  map.prune();
  return map;
}

}  // namespace octoplan
