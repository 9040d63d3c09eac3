#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "octoplan/geometry.hpp"
#include "octoplan/octree.hpp"
#include "octoplan/world.hpp"

namespace octoplan {

/// Regular fan of ray directions around a sensor. Angles are in degrees;
/// elevation is measured from the horizontal plane.
struct RayFan {
  std::size_t azimuth_steps = 360;
  std::size_t elevation_steps = 90;
  double elevation_min = -60.0;
  double elevation_max = 60.0;

  std::vector<State> directions() const;
};

struct ScanPose {
  State origin;
  double max_range = 10.0;
  RayFan fan;
  /// Ground truth seen by this scan; the script's obstacles when unset.
  std::optional<std::vector<Obstacle>> obstacles;
};

/// A synthetic mapping run: ground-truth 3D obstacles and sensor poses.
struct MapScript {
  double resolution = 0.05;
  unsigned max_depth = 16;
  /// Poses must lie inside these bounds.
  Bounds bounds;
  std::vector<Obstacle> obstacles;
  std::vector<ScanPose> scans;
};

/// Throws std::runtime_error naming the offending field.
MapScript parse_map_script(const std::string& json_text);
MapScript load_map_script(const std::filesystem::path& path);

/// Octree in which every voxel overlapping an obstacle's interior is set to
/// the occupied clamp; nothing else is stored.
OccupancyOctree rasterize_obstacles(const std::vector<Obstacle>& obstacles, double resolution,
                                    unsigned max_depth);

/// Simulated scan of `truth` from a pose: one point per fan direction, at the
/// first occupied voxel or range-truncated just past max_range.
PosedScan simulate_scan(const OccupancyOctree& truth, const ScanPose& pose);

/// Runs every scan of the script into a fresh map and prunes it.
OccupancyOctree build_map(const MapScript& script);

}  // namespace octoplan
