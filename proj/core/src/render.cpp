#include "octoplan/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <variant>

#include <fmt/format.h>

namespace octoplan {

namespace {

bool point_in_obstacle(const Obstacle& o, double x, double y, std::optional<double> z) {
  return std::visit(
      [&](const auto& ob) {
        using T = std::decay_t<decltype(ob)>;
        const State& c = ob.center;
        if constexpr (std::is_same_v<T, BoxObstacle>) {
          if (std::abs(x - c[0]) > ob.extent[0] / 2 || std::abs(y - c[1]) > ob.extent[1] / 2) {
            return false;
          }
          return !z || std::abs(*z - c[2]) <= ob.extent[2] / 2;
        } else {
          double d2 = (x - c[0]) * (x - c[0]) + (y - c[1]) * (y - c[1]);
          if (z) d2 += (*z - c[2]) * (*z - c[2]);
          return d2 <= ob.radius * ob.radius;
        }
      },
      o);
}

struct Canvas {
  double x0, y0, x1, y1, scale;
  double sx(double x) const { return (x - x0) * scale; }
  double sy(double y) const { return (y1 - y) * scale; }
};

Canvas canvas_for(double x0, double y0, double x1, double y1) {
  const double span = std::max(x1 - x0, y1 - y0);
  return Canvas{x0, y0, x1, y1, 800.0 / span};
}

void grid_cells_svg(std::string& out, const Grid2D& g, const Canvas& cv, bool draw_free) {
  for (std::size_t j = 0; j < g.height(); ++j) {
    for (std::size_t i = 0; i < g.width(); ++i) {
      const Occupancy o = g.at(i, j);
      const char* fill = o == Occupancy::Occupied ? "#202020"
                         : o == Occupancy::Unknown ? "#b0b0b0"
                                                   : nullptr;
      if (!fill && !draw_free) continue;
      if (!fill) fill = "#ffffff";
      const double x = g.x0() + static_cast<double>(i) * g.resolution();
      const double y = g.y0() + static_cast<double>(j + 1) * g.resolution();
      const double w = g.resolution() * cv.scale;
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
                         "fill=\"{}\"/>\n",
                         cv.sx(x), cv.sy(y), w, w, fill);
    }
  }
}

}  // namespace

double render_height(const Scenario& s) {
  if (s.dimension == 2) return 0.0;
  if (!s.sensor_height) {
    throw std::invalid_argument("rendering a 3D scenario needs a sensor_height");
  }
  return *s.sensor_height;
}

namespace {

Grid2D slice_over(const Scenario& s, double height, double resolution, double margin) {
  const State lo{s.bounds.min()[0] - margin, s.bounds.min()[1] - margin};
  const State hi{s.bounds.max()[0] + margin, s.bounds.max()[1] + margin};
  const Bounds b(lo, hi);
  if (s.world->kind() == World::Kind::Octree) {
    return s.world->octree()->cross_section(height, resolution, lo[0], lo[1], hi[0], hi[1]);
  }
  const auto w = static_cast<std::size_t>(std::ceil(b.extent(0) / resolution - 1e-9));
  const auto h = static_cast<std::size_t>(std::ceil(b.extent(1) / resolution - 1e-9));
  Grid2D g(b.min()[0], b.min()[1], resolution, std::max<std::size_t>(w, 1),
           std::max<std::size_t>(h, 1), Occupancy::Free);
  const std::optional<double> z = s.dimension == 3 ? std::optional<double>(height) : std::nullopt;
  for (std::size_t j = 0; j < g.height(); ++j) {
    for (std::size_t i = 0; i < g.width(); ++i) {
      const double x = g.x0() + (static_cast<double>(i) + 0.5) * resolution;
      const double y = g.y0() + (static_cast<double>(j) + 0.5) * resolution;
      for (const auto& o : s.obstacles) {
        if (point_in_obstacle(o, x, y, z)) {
          g.set(i, j, Occupancy::Occupied);
          break;
        }
      }
    }
  }
  return g;
}

}  // namespace

Grid2D scenario_slice(const Scenario& s, double height, double resolution) {
  return slice_over(s, height, resolution, 0.0);
}

Scenario slice_scenario(const Scenario& s, double height, double resolution) {
  // The robot ball near the bounds still sees cells beyond them.
  auto grid = std::make_shared<const Grid2D>(
      slice_over(s, height, resolution, s.robot_radius + resolution));
  const Bounds& b = s.bounds;
  Scenario out;
  out.name = s.name + "_slice";
  out.dimension = 2;
  out.bounds = Bounds(State{b.min()[0], b.min()[1]}, State{b.max()[0], b.max()[1]});
  out.start = State{s.start[0], s.start[1]};
  out.goal = State{s.goal[0], s.goal[1]};
  out.goal_tolerance = s.goal_tolerance;
  out.robot_radius = s.robot_radius;
  out.world = std::make_shared<const World>(World::from_grid(out.bounds, grid));
  out.validity = s.validity;
  out.validity.check_resolution = std::min(s.validity.check_resolution, resolution / 2.0);
  return out;
}

std::vector<std::uint8_t> Raster::to_ppm() const {
  std::string header = fmt::format("P6\n{} {}\n255\n", width, height);
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (std::size_t r = 0; r < height; ++r) {
    const std::size_t j = height - 1 - r;
    for (std::size_t i = 0; i < width; ++i) {
      std::uint8_t px[3] = {255, 255, 255};
      const Occupancy o = cells[j * width + i];
      if (o == Occupancy::Occupied) px[0] = px[1] = px[2] = 32;
      if (o == Occupancy::Unknown) px[0] = px[1] = px[2] = 176;
      if (path_mask[j * width + i]) {
        px[0] = 0;
        px[1] = 160;
        px[2] = 0;
      }
      out.insert(out.end(), px, px + 3);
    }
  }
  return out;
}

Raster render_raster(const Scenario& s, const Path* path, double meters_per_pixel) {
  if (!(meters_per_pixel > 0.0)) throw std::invalid_argument("render_raster: bad pixel size");
  Grid2D g;
  const OccupancyOctree* map = s.world->octree();
  if (map && meters_per_pixel < map->resolution()) {
    // The cross-section cannot be finer than the map; resample it per pixel.
    const Grid2D coarse = scenario_slice(s, render_height(s), map->resolution());
    const Bounds& b = s.bounds;
    const auto w = static_cast<std::size_t>(std::ceil(b.extent(0) / meters_per_pixel - 1e-9));
    const auto h = static_cast<std::size_t>(std::ceil(b.extent(1) / meters_per_pixel - 1e-9));
    g = Grid2D(b.min()[0], b.min()[1], meters_per_pixel, std::max<std::size_t>(w, 1),
               std::max<std::size_t>(h, 1), Occupancy::Unknown);
    for (std::size_t j = 0; j < g.height(); ++j) {
      for (std::size_t i = 0; i < g.width(); ++i) {
        g.set(i, j, coarse.query(g.x0() + (static_cast<double>(i) + 0.5) * meters_per_pixel,
                                 g.y0() + (static_cast<double>(j) + 0.5) * meters_per_pixel));
      }
    }
  } else {
    g = scenario_slice(s, render_height(s), meters_per_pixel);
  }
  Raster r;
  r.width = g.width();
  r.height = g.height();
  r.x0 = g.x0();
  r.y0 = g.y0();
  r.pixel = meters_per_pixel;
  r.cells.resize(r.width * r.height);
  for (std::size_t j = 0; j < r.height; ++j) {
    for (std::size_t i = 0; i < r.width; ++i) r.cells[j * r.width + i] = g.at(i, j);
  }
  r.path_mask.assign(r.width * r.height, 0);
  if (path) {
    auto mark = [&](double x, double y) {
      if (auto c = g.cell_of(x, y)) r.path_mask[c->second * r.width + c->first] = 1;
    };
    for (std::size_t k = 0; k + 1 < path->states.size(); ++k) {
      const State& a = path->states[k];
      const State& b = path->states[k + 1];
      const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
      const auto steps = static_cast<std::size_t>(std::ceil(len / (0.25 * meters_per_pixel)));
      for (std::size_t t = 0; t <= steps; ++t) {
        const double f = steps == 0 ? 0.0 : static_cast<double>(t) / static_cast<double>(steps);
        mark(a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]));
      }
    }
  }
  return r;
}

std::string render_svg(const Scenario& s, const Path* path) {
  const Bounds& b = s.bounds;
  const Canvas cv = canvas_for(b.min()[0], b.min()[1], b.max()[0], b.max()[1]);
  const double w = (b.max()[0] - b.min()[0]) * cv.scale;
  const double h = (b.max()[1] - b.min()[1]) * cv.scale;
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.2f} {:.2f}\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\" "
      "stroke=\"#000000\"/>\n",
      std::ceil(w), std::ceil(h), w, h);

  const bool analytic2d = s.world->kind() == World::Kind::Analytic && s.dimension == 2;
  if (analytic2d) {
    for (const auto& o : s.obstacles) {
      std::visit(
          [&](const auto& ob) {
            using T = std::decay_t<decltype(ob)>;
            if constexpr (std::is_same_v<T, BoxObstacle>) {
              out += fmt::format(
                  "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
                  "fill=\"#202020\"/>\n",
                  cv.sx(ob.center[0] - ob.extent[0] / 2), cv.sy(ob.center[1] + ob.extent[1] / 2),
                  ob.extent[0] * cv.scale, ob.extent[1] * cv.scale);
            } else {
              out += fmt::format(
                  "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"#202020\"/>\n",
                  cv.sx(ob.center[0]), cv.sy(ob.center[1]), ob.radius * cv.scale);
            }
          },
          o);
    }
  } else {
    const double res = s.world->kind() == World::Kind::Octree ? s.world->octree()->resolution()
                                                              : b.diagonal() / 400.0;
    grid_cells_svg(out, scenario_slice(s, render_height(s), res), cv, false);
  }

  if (path && !path->states.empty()) {
    out += "<polyline fill=\"none\" stroke=\"#00a000\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < path->states.size(); ++i) {
      if (i > 0) out += ' ';
      out += fmt::format("{:.2f},{:.2f}", cv.sx(path->states[i][0]), cv.sy(path->states[i][1]));
    }
    out += "\"/>\n";
  }
  out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" fill=\"#0050ff\"/>\n",
                     cv.sx(s.start[0]), cv.sy(s.start[1]));
  out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" fill=\"#ff3000\"/>\n",
                     cv.sx(s.goal[0]), cv.sy(s.goal[1]));
  return out + "</svg>\n";
}

std::string render_grid_svg(const Grid2D& grid) {
  const double x1 = grid.x0() + static_cast<double>(grid.width()) * grid.resolution();
  const double y1 = grid.y0() + static_cast<double>(grid.height()) * grid.resolution();
  const Canvas cv = x1 > grid.x0() && y1 > grid.y0() ? canvas_for(grid.x0(), grid.y0(), x1, y1)
                                                     : Canvas{0, 0, 1, 1, 1};
  const double w = (x1 - grid.x0()) * cv.scale;
  const double h = (y1 - grid.y0()) * cv.scale;
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.2f} {:.2f}\">\n",
      std::ceil(w), std::ceil(h), w, h);
  grid_cells_svg(out, grid, cv, true);
  return out + "</svg>\n";
}

void render_scene(const Scenario& s, const std::optional<Path>& path,
                  const std::filesystem::path& out) {
  const Path* p = path ? &*path : nullptr;
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out.string());
  if (out.extension() == ".ppm") {
    const auto bytes = render_raster(s, p, s.bounds.diagonal() / 800.0).to_ppm();
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  } else {
    f << render_svg(s, p);
  }
}

}  // namespace octoplan
