#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "octoplan/geometry.hpp"
#include "octoplan/grid2d.hpp"
#include "octoplan/scenario.hpp"

namespace octoplan {

/// Horizontal occupancy slice of a scenario's workspace over its xy bounds.
/// 2D analytic scenarios ignore the height. Map scenarios use the octree
/// cross-section; 3D analytic scenarios intersect the obstacles with the plane.
Grid2D scenario_slice(const Scenario& s, double height, double resolution);

/// The planar problem a 2D planner would solve on the slice: grid world over
/// the xy bounds, same robot radius, start and goal projected to xy.
Scenario slice_scenario(const Scenario& s, double height, double resolution);

/// Height used to draw a scenario: its sensor height for 3D scenarios.
/// Throws std::invalid_argument for a 3D scenario without one.
double render_height(const Scenario& s);

/// Raster rendering with the layers kept apart for inspection.
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double pixel = 0.01;  // meters per pixel
  std::vector<Occupancy> cells;  // row 0 at the bottom (y0)
  std::vector<std::uint8_t> path_mask;

  bool obstacle(std::size_t i, std::size_t j) const {
    return cells[j * width + i] == Occupancy::Occupied;
  }
  bool on_path(std::size_t i, std::size_t j) const { return path_mask[j * width + i] != 0; }
  /// Binary PPM (P6), top row first.
  std::vector<std::uint8_t> to_ppm() const;
};

Raster render_raster(const Scenario& s, const Path* path, double meters_per_pixel);

/// SVG of the slice (or 2D world) with the path and start/goal markers.
std::string render_svg(const Scenario& s, const Path* path);

/// SVG of a bare occupancy grid.
std::string render_grid_svg(const Grid2D& grid);

/// Writes SVG or PPM depending on the file extension (.svg / .ppm).
void render_scene(const Scenario& s, const std::optional<Path>& path,
                  const std::filesystem::path& out);

}  // namespace octoplan
