#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "octoplan/geometry.hpp"
#include "octoplan/grid2d.hpp"
#include "octoplan/octree.hpp"

namespace octoplan {

/// Axis-aligned box; `extent` holds the full side lengths.
struct BoxObstacle {
  State center;
  State extent;
};

struct BallObstacle {
  State center;
  double radius = 0.0;
};

using Obstacle = std::variant<BoxObstacle, BallObstacle>;

/// Bounding-ball approximation of the robot body.
struct RobotShape {
  double radius = 0.0;
};

struct ValidityConfig {
  bool unknown_is_invalid = true;
  /// Maximum spacing between checked states along a motion (meters).
  double check_resolution = 0.01;
};

/// The workspace a planner checks against: analytic obstacles, a 3D occupancy
/// octree, or a 2D occupancy grid, plus axis-aligned planning bounds.
class World {
 public:
  enum class Kind { Analytic, Octree, Grid };

  /// Throws std::invalid_argument on dimension mismatches or bad extents.
  static World analytic(Bounds bounds, std::vector<Obstacle> obstacles);
  /// Dense voxel lookups are cached over `bounds` grown by `cache_margin`
  /// when the cached block stays below a fixed size.
  static World from_octree(Bounds bounds, std::shared_ptr<const OccupancyOctree> map,
                           double cache_margin = 1.0);
  static World from_grid(Bounds bounds, std::shared_ptr<const Grid2D> grid);

  Kind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return bounds_.dim(); }
  const Bounds& bounds() const noexcept { return bounds_; }
  const std::vector<Obstacle>& obstacles() const noexcept { return obstacles_; }
  const OccupancyOctree* octree() const noexcept { return map_.get(); }
  const Grid2D* grid() const noexcept { return grid_.get(); }

  /// Half the map resolution for map worlds, 0.01 m for analytic ones.
  ValidityConfig default_validity() const noexcept;

  /// Occupancy of a leaf voxel (octree worlds), using the dense cache.
  Occupancy voxel(std::int64_t kx, std::int64_t ky, std::int64_t kz) const noexcept;

 private:
  World() = default;

  Kind kind_ = Kind::Analytic;
  Bounds bounds_;
  std::vector<Obstacle> obstacles_;
  std::shared_ptr<const OccupancyOctree> map_;
  std::shared_ptr<const Grid2D> grid_;

  struct VoxelCache {
    std::array<std::int64_t, 3> lo{};
    std::array<std::int64_t, 3> size{};
    std::vector<Occupancy> cells;
  };
  std::shared_ptr<const VoxelCache> cache_;
};

bool is_state_valid(const World& world, const RobotShape& shape, const ValidityConfig& cfg,
                    const State& x);

/// Checks both endpoints and evenly spaced states no more than
/// cfg.check_resolution apart, then sweeps the ball along the segment so that
/// no obstacle is clipped between checked states. The result does not depend
/// on endpoint order.
bool is_motion_valid(const World& world, const RobotShape& shape, const ValidityConfig& cfg,
                     const State& a, const State& b);

/// Squared distance from a point to a closed box.
double squared_distance_to_box(const State& x, const State& lo, const State& hi) noexcept;
/// Squared distance from the segment [a, b] to a closed box (at most 3D).
double squared_distance_segment_to_box(const State& a, const State& b, const State& lo,
                                       const State& hi) noexcept;

/// Bundles a world with a robot and validity settings and counts checks.
class ValidityChecker {
 public:
  ValidityChecker(std::shared_ptr<const World> world, RobotShape shape, ValidityConfig cfg);

  const World& world() const noexcept { return *world_; }
  const RobotShape& shape() const noexcept { return shape_; }
  const ValidityConfig& config() const noexcept { return cfg_; }

  bool state_valid(const State& x) const {
    ++state_checks_;
    return is_state_valid(*world_, shape_, cfg_, x);
  }
  bool motion_valid(const State& a, const State& b) const {
    ++motion_checks_;
    return is_motion_valid(*world_, shape_, cfg_, a, b);
  }

  std::uint64_t state_checks() const noexcept { return state_checks_; }
  std::uint64_t motion_checks() const noexcept { return motion_checks_; }

 private:
  std::shared_ptr<const World> world_;
  RobotShape shape_;
  ValidityConfig cfg_;
  mutable std::uint64_t state_checks_ = 0;
  mutable std::uint64_t motion_checks_ = 0;
};

}  // namespace octoplan
