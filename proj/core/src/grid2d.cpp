#include "octoplan/grid2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace octoplan {

const char* to_string(Occupancy o) noexcept {
  switch (o) {
    case Occupancy::Free:
      return "free";
    case Occupancy::Occupied:
      return "occupied";
    case Occupancy::Unknown:
      return "unknown";
  }
  return "?";
}

Grid2D::Grid2D(double x0, double y0, double resolution, std::size_t width, std::size_t height,
               Occupancy fill)
    : x0_(x0), y0_(y0), res_(resolution), width_(width), height_(height),
      cells_(width * height, fill) {
  if (!(resolution > 0.0)) throw std::invalid_argument("Grid2D: resolution must be positive");
}

std::optional<std::pair<std::size_t, std::size_t>> Grid2D::cell_of(double x,
                                                                   double y) const noexcept {
  const double fi = std::floor((x - x0_) / res_);
  const double fj = std::floor((y - y0_) / res_);
  if (!(fi >= 0.0 && fj >= 0.0 && fi < static_cast<double>(width_) &&
        fj < static_cast<double>(height_))) {
    return std::nullopt;
  }
  return std::pair{static_cast<std::size_t>(fi), static_cast<std::size_t>(fj)};
}

Occupancy Grid2D::query(double x, double y) const noexcept {
  if (auto c = cell_of(x, y)) return at(c->first, c->second);
  return Occupancy::Unknown;
}

std::size_t Grid2D::count(Occupancy v) const noexcept {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), v));
}

}  // namespace octoplan
