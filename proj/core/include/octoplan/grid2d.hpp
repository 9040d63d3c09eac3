#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace octoplan {

enum class Occupancy : std::uint8_t { Free, Occupied, Unknown };

const char* to_string(Occupancy o) noexcept;

/// Row-major 2D occupancy grid. Cell (i, j) covers
/// [x0 + i*res, x0 + (i+1)*res) x [y0 + j*res, y0 + (j+1)*res).
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(double x0, double y0, double resolution, std::size_t width, std::size_t height,
         Occupancy fill = Occupancy::Unknown);

  double x0() const noexcept { return x0_; }
  double y0() const noexcept { return y0_; }
  double resolution() const noexcept { return res_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }

  Occupancy at(std::size_t i, std::size_t j) const noexcept { return cells_[j * width_ + i]; }
  void set(std::size_t i, std::size_t j, Occupancy v) noexcept { cells_[j * width_ + i] = v; }

  /// Cell containing (x, y), if inside the grid.
  std::optional<std::pair<std::size_t, std::size_t>> cell_of(double x, double y) const noexcept;

  /// Occupancy at (x, y); Unknown outside the grid.
  Occupancy query(double x, double y) const noexcept;

  std::size_t count(Occupancy v) const noexcept;

 private:
  double x0_ = 0.0;
  double y0_ = 0.0;
  double res_ = 1.0;
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Occupancy> cells_;
};

}  // namespace octoplan
