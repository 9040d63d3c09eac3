#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "octoplan/geometry.hpp"
#include "octoplan/grid2d.hpp"

namespace octoplan {

/// Log-odds sensor model. Defaults follow common occupancy-mapping practice.
struct LogOddsParams {
  double hit = 0.85;
  double miss = -0.4;
  double clamp_min = -2.0;
  double clamp_max = 3.5;
  double occupied_threshold = 0.0;

  /// Throws std::invalid_argument unless hit > 0 > miss and
  /// clamp_min < occupied_threshold < clamp_max.
  void validate() const;
};

/// Leaf-level voxel address. Each index is < 2^max_depth.
struct VoxelKey {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint32_t z = 0;

  auto operator<=>(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const noexcept {
    std::uint64_t h = (static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ULL) ^
                      (static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4FULL) ^
                      (static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ULL);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// Depth data captured at a known sensor position, in the world frame.
/// A point farther than max_range from the origin is range-truncated: its ray
/// clears space up to max_range but marks no endpoint.
struct PosedScan {
  State origin;
  std::vector<State> points;
  double max_range = 10.0;
};

/// Raised by OccupancyOctree::deserialize for malformed input.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Probabilistic occupancy map over a cube of side resolution * 2^max_depth
/// centered at the origin. Leaves store clamped log-odds; a leaf above leaf
/// depth stands for a merged (pruned) block of identical voxels.
class OccupancyOctree {
 public:
  static constexpr unsigned kMaxSupportedDepth = 21;

  explicit OccupancyOctree(double resolution, unsigned max_depth = 16, LogOddsParams params = {});
  OccupancyOctree(const OccupancyOctree& other);
  OccupancyOctree& operator=(const OccupancyOctree& other);
  OccupancyOctree(OccupancyOctree&&) noexcept;
  OccupancyOctree& operator=(OccupancyOctree&&) noexcept;
  ~OccupancyOctree();

  double resolution() const noexcept { return resolution_; }
  unsigned max_depth() const noexcept { return max_depth_; }
  const LogOddsParams& params() const noexcept { return params_; }
  double cube_side() const noexcept;
  /// Addressable cube as planning bounds.
  Bounds cube_bounds() const;

  bool empty() const noexcept { return root_ == nullptr; }
  std::size_t node_count() const noexcept;
  std::size_t leaf_count() const noexcept;

  std::optional<VoxelKey> key_of(const State& p) const noexcept;
  State key_center(const VoxelKey& k) const;

  /// Adds one hit or miss to the voxel and clamps.
  void update(const VoxelKey& k, bool hit);
  /// Overwrites the voxel's log-odds (clamped).
  void set_log_odds(const VoxelKey& k, double log_odds);

  std::optional<float> log_odds(const VoxelKey& k) const noexcept;
  std::optional<float> log_odds(const State& p) const noexcept;

  Occupancy classify(float log_odds) const noexcept;
  Occupancy query(const VoxelKey& k) const noexcept;
  Occupancy query(const State& p) const noexcept;

  /// Ray-casts every point of the scan: misses along each ray, hits at
  /// endpoints, at most one update per voxel per scan with hits winning.
  /// Throws std::invalid_argument if the origin is outside the cube.
  void insert_scan(const PosedScan& scan);

  /// Merges every node whose eight children are leaves with equal values.
  void prune();

  /// Center of the first Occupied voxel along the ray within max_range.
  /// Unknown voxels do not stop the ray.
  std::optional<State> cast_ray(const State& origin, const State& direction,
                                double max_range) const;

  /// Voxels traversed from origin's voxel up to (excluding) end's voxel.
  /// Both points must lie inside the cube.
  std::vector<VoxelKey> ray_keys(const State& origin, const State& end) const;

  std::vector<std::uint8_t> serialize() const;
  static OccupancyOctree deserialize(std::span<const std::uint8_t> bytes,
                                     LogOddsParams params = {});
  void save(const std::filesystem::path& path) const;
  static OccupancyOctree load(const std::filesystem::path& path, LogOddsParams params = {});

  /// Horizontal slice over the xy extent of all stored leaves.
  Grid2D cross_section(double height, double resolution_2d) const;
  /// Horizontal slice over an explicit xy window [x_min, x_max] x [y_min, y_max].
  Grid2D cross_section(double height, double resolution_2d, double x_min, double y_min,
                       double x_max, double y_max) const;

  using LeafVisitor = std::function<void(const State& lo, const State& hi, float log_odds)>;
  /// Visits every leaf with its axis-aligned extent, in preorder.
  void for_each_leaf(const LeafVisitor& visit) const;

 private:
  struct Node;

  double resolution_;
  unsigned max_depth_;
  LogOddsParams params_;
  std::unique_ptr<Node> root_;

  Node& leaf_for_update(const VoxelKey& k);
  const Node* find(const VoxelKey& k, unsigned* depth_out = nullptr) const noexcept;
  float clamp(double v) const noexcept;
};

}  // namespace octoplan
