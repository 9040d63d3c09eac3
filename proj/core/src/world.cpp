#include "octoplan/world.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace octoplan {

namespace {

constexpr std::size_t kMaxCacheCells = std::size_t{64} << 20;

std::int64_t axis_key(double coord, double res, double half_count) {
  return static_cast<std::int64_t>(std::floor(coord / res) + half_count);
}

}  // namespace

World World::analytic(Bounds bounds, std::vector<Obstacle> obstacles) {
  World w;
  w.kind_ = Kind::Analytic;
  for (const auto& o : obstacles) {
    std::visit(
        [&](const auto& ob) {
          using T = std::decay_t<decltype(ob)>;
          if (ob.center.dim() != bounds.dim()) {
            throw std::invalid_argument("World: obstacle dimension differs from bounds");
          }
          if constexpr (std::is_same_v<T, BoxObstacle>) {
            if (ob.extent.dim() != bounds.dim()) {
              throw std::invalid_argument("World: box extent dimension differs from bounds");
            }
            for (std::size_t i = 0; i < ob.extent.dim(); ++i) {
              if (ob.extent[i] < 0.0) throw std::invalid_argument("World: negative box extent");
            }
          } else {
            if (ob.radius < 0.0) throw std::invalid_argument("World: negative ball radius");
          }
        },
        o);
  }
  w.bounds_ = std::move(bounds);
  w.obstacles_ = std::move(obstacles);
  return w;
}

World World::from_octree(Bounds bounds, std::shared_ptr<const OccupancyOctree> map,
                         double cache_margin) {
  if (!map) throw std::invalid_argument("World: null octree");
  if (bounds.dim() != 3) throw std::invalid_argument("World: octree worlds are 3D");
  World w;
  w.kind_ = Kind::Octree;
  w.bounds_ = std::move(bounds);
  w.map_ = std::move(map);

  const double res = w.map_->resolution();
  const double half_count = std::ldexp(1.0, static_cast<int>(w.map_->max_depth()) - 1);
  auto cache = std::make_shared<VoxelCache>();
  std::size_t cells = 1;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::int64_t lo = axis_key(w.bounds_.min()[i] - cache_margin, res, half_count);
    const std::int64_t hi = axis_key(w.bounds_.max()[i] + cache_margin, res, half_count);
    cache->lo[i] = lo;
    cache->size[i] = hi - lo + 1;
    cells *= static_cast<std::size_t>(cache->size[i]);
    if (cells > kMaxCacheCells) return w;
  }
  cache->cells.resize(cells);
  const std::int64_t limit = static_cast<std::int64_t>(2.0 * half_count);
  std::size_t idx = 0;
  for (std::int64_t z = 0; z < cache->size[2]; ++z) {
    for (std::int64_t y = 0; y < cache->size[1]; ++y) {
      for (std::int64_t x = 0; x < cache->size[0]; ++x, ++idx) {
        const std::int64_t kx = cache->lo[0] + x;
        const std::int64_t ky = cache->lo[1] + y;
        const std::int64_t kz = cache->lo[2] + z;
        if (kx < 0 || ky < 0 || kz < 0 || kx >= limit || ky >= limit || kz >= limit) {
          cache->cells[idx] = Occupancy::Unknown;
        } else {
          cache->cells[idx] = w.map_->query(VoxelKey{static_cast<std::uint32_t>(kx),
                                                     static_cast<std::uint32_t>(ky),
                                                     static_cast<std::uint32_t>(kz)});
        }
      }
    }
  }
  w.cache_ = std::move(cache);
  return w;
}

World World::from_grid(Bounds bounds, std::shared_ptr<const Grid2D> grid) {
  if (!grid) throw std::invalid_argument("World: null grid");
  if (bounds.dim() != 2) throw std::invalid_argument("World: grid worlds are 2D");
  World w;
  w.kind_ = Kind::Grid;
  w.bounds_ = std::move(bounds);
  w.grid_ = std::move(grid);
  return w;
}

ValidityConfig World::default_validity() const noexcept {
  ValidityConfig cfg;
  switch (kind_) {
    case Kind::Analytic:
      cfg.check_resolution = 0.01;
      break;
    case Kind::Octree:
      cfg.check_resolution = map_->resolution() / 2.0;
      break;
    case Kind::Grid:
      cfg.check_resolution = grid_->resolution() / 2.0;
      break;
  }
  return cfg;
}

Occupancy World::voxel(std::int64_t kx, std::int64_t ky, std::int64_t kz) const noexcept {
  if (cache_) {
    const std::int64_t x = kx - cache_->lo[0];
    const std::int64_t y = ky - cache_->lo[1];
    const std::int64_t z = kz - cache_->lo[2];
    if (x >= 0 && y >= 0 && z >= 0 && x < cache_->size[0] && y < cache_->size[1] &&
        z < cache_->size[2]) {
      return cache_->cells[static_cast<std::size_t>((z * cache_->size[1] + y) * cache_->size[0] + x)];
    }
  }
  const std::int64_t limit = std::int64_t{1} << map_->max_depth();
  if (kx < 0 || ky < 0 || kz < 0 || kx >= limit || ky >= limit || kz >= limit) {
    return Occupancy::Unknown;
  }
  return map_->query(VoxelKey{static_cast<std::uint32_t>(kx), static_cast<std::uint32_t>(ky),
                              static_cast<std::uint32_t>(kz)});
}

double squared_distance_to_box(const State& x, const State& lo, const State& hi) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    double d = 0.0;
    if (x[i] < lo[i]) {
      d = lo[i] - x[i];
    } else if (x[i] > hi[i]) {
      d = x[i] - hi[i];
    }
    s += d * d;
  }
  return s;
}

double squared_distance_segment_to_box(const State& a, const State& b, const State& lo,
                                       const State& hi) noexcept {
  const std::size_t n = a.dim();
  // The squared distance is convex and piecewise quadratic in t; the pieces
  // change where a coordinate crosses a face plane.
  std::array<double, 8> ts{};
  std::size_t count = 0;
  ts[count++] = 0.0;
  ts[count++] = 1.0;
  for (std::size_t i = 0; i < n && i < 3; ++i) {
    const double d = b[i] - a[i];
    if (d == 0.0) continue;
    for (double face : {lo[i], hi[i]}) {
      const double t = (face - a[i]) / d;
      if (t > 0.0 && t < 1.0) ts[count++] = t;
    }
  }
  std::sort(ts.begin(), ts.begin() + static_cast<std::ptrdiff_t>(count));
  double best = std::min(squared_distance_to_box(a, lo, hi), squared_distance_to_box(b, lo, hi));
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double t0 = ts[k], t1 = ts[k + 1];
    if (!(t1 > t0)) continue;
    const double tm = 0.5 * (t0 + t1);
    double cc = 0.0, ce = 0.0, ee = 0.0;
    std::array<double, 3> c{}, e{};
    for (std::size_t i = 0; i < n; ++i) {
      const double d = b[i] - a[i];
      const double p = a[i] + d * tm;
      if (p < lo[i]) {
        c[i] = a[i] - lo[i];
      } else if (p > hi[i]) {
        c[i] = a[i] - hi[i];
      } else {
        continue;
      }
      e[i] = d;
      cc += c[i] * c[i];
      ce += c[i] * e[i];
      ee += e[i] * e[i];
    }
    const double t = ee > 0.0 ? std::clamp(-ce / ee, t0, t1) : t0;
    best = std::min(best, std::max(0.0, cc + 2.0 * ce * t + ee * t * t));
  }
  return best;
}

namespace {

// Swept checks treat contact within this distance as a collision, which
// absorbs rounding in the interpolated states of any finer re-check.
constexpr double kSweepMargin = 1e-9;

bool blocked(Occupancy o, const ValidityConfig& cfg) noexcept {
  return o == Occupancy::Occupied || (o == Occupancy::Unknown && cfg.unknown_is_invalid);
}

bool analytic_valid(const World& world, double r, const State& x) {
  const double r2 = r * r;
  for (const auto& o : world.obstacles()) {
    if (const auto* box = std::get_if<BoxObstacle>(&o)) {
      const State half = box->extent * 0.5;
      if (squared_distance_to_box(x, box->center - half, box->center + half) <= r2) return false;
    } else {
      const auto& ball = std::get<BallObstacle>(o);
      const double reach = ball.radius + r;
      if (squared_distance(x, ball.center) <= reach * reach) return false;
    }
  }
  return true;
}

bool octree_valid(const World& world, double r, const ValidityConfig& cfg, const State& x) {
  const OccupancyOctree& map = *world.octree();
  const double res = map.resolution();
  const double half_count = std::ldexp(1.0, static_cast<int>(map.max_depth()) - 1);
  std::array<std::int64_t, 3> lo{};
  std::array<std::int64_t, 3> hi{};
  for (std::size_t i = 0; i < 3; ++i) {
    lo[i] = axis_key(x[i] - r, res, half_count);
    hi[i] = axis_key(x[i] + r, res, half_count);
  }
  // The voxel holding the center first: the cheapest rejection.
  const std::array<std::int64_t, 3> c{axis_key(x[0], res, half_count),
                                      axis_key(x[1], res, half_count),
                                      axis_key(x[2], res, half_count)};
  if (blocked(world.voxel(c[0], c[1], c[2]), cfg)) return false;
  if (r == 0.0) return true;
  const double r2 = r * r;
  auto voxel_lo = [&](std::int64_t k) { return (static_cast<double>(k) - half_count) * res; };
  for (std::int64_t kz = lo[2]; kz <= hi[2]; ++kz) {
    const double z0 = voxel_lo(kz);
    const double dz = x[2] < z0 ? z0 - x[2] : (x[2] > z0 + res ? x[2] - z0 - res : 0.0);
    for (std::int64_t ky = lo[1]; ky <= hi[1]; ++ky) {
      const double y0 = voxel_lo(ky);
      const double dy = x[1] < y0 ? y0 - x[1] : (x[1] > y0 + res ? x[1] - y0 - res : 0.0);
      const double dyz = dy * dy + dz * dz;
      if (dyz > r2) continue;
      for (std::int64_t kx = lo[0]; kx <= hi[0]; ++kx) {
        const double x0 = voxel_lo(kx);
        const double dx = x[0] < x0 ? x0 - x[0] : (x[0] > x0 + res ? x[0] - x0 - res : 0.0);
        if (dx * dx + dyz > r2) continue;
        if (blocked(world.voxel(kx, ky, kz), cfg)) return false;
      }
    }
  }
  return true;
}

bool grid_valid(const World& world, double r, const ValidityConfig& cfg, const State& x) {
  const Grid2D& g = *world.grid();
  const double res = g.resolution();
  if (blocked(g.query(x[0], x[1]), cfg)) return false;
  if (r == 0.0) return true;
  const auto i0 = static_cast<std::int64_t>(std::floor((x[0] - r - g.x0()) / res));
  const auto i1 = static_cast<std::int64_t>(std::floor((x[0] + r - g.x0()) / res));
  const auto j0 = static_cast<std::int64_t>(std::floor((x[1] - r - g.y0()) / res));
  const auto j1 = static_cast<std::int64_t>(std::floor((x[1] + r - g.y0()) / res));
  const double r2 = r * r;
  const auto w = static_cast<std::int64_t>(g.width());
  const auto h = static_cast<std::int64_t>(g.height());
  for (std::int64_t j = j0; j <= j1; ++j) {
    const double cy0 = g.y0() + static_cast<double>(j) * res;
    const double dy = x[1] < cy0 ? cy0 - x[1] : (x[1] > cy0 + res ? x[1] - cy0 - res : 0.0);
    for (std::int64_t i = i0; i <= i1; ++i) {
      const double cx0 = g.x0() + static_cast<double>(i) * res;
      const double dx = x[0] < cx0 ? cx0 - x[0] : (x[0] > cx0 + res ? x[0] - cx0 - res : 0.0);
      if (dx * dx + dy * dy > r2) continue;
      const Occupancy o = (i < 0 || j < 0 || i >= w || j >= h)
                              ? Occupancy::Unknown
                              : g.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (blocked(o, cfg)) return false;
    }
  }
  return true;
}

bool analytic_sweep_valid(const World& world, double r, const State& a, const State& b) {
  const double reach = (r + kSweepMargin) * (r + kSweepMargin);
  for (const auto& o : world.obstacles()) {
    if (const auto* box = std::get_if<BoxObstacle>(&o)) {
      const State half = box->extent * 0.5;
      if (squared_distance_segment_to_box(a, b, box->center - half, box->center + half) <= reach) {
        return false;
      }
    } else {
      const auto& ball = std::get<BallObstacle>(o);
      const double ball_reach = (ball.radius + r + kSweepMargin) * (ball.radius + r + kSweepMargin);
      double dd = 0.0, cd = 0.0;
      for (std::size_t i = 0; i < a.dim(); ++i) {
        const double d = b[i] - a[i];
        dd += d * d;
        cd += (ball.center[i] - a[i]) * d;
      }
      const double t = dd > 0.0 ? std::clamp(cd / dd, 0.0, 1.0) : 0.0;
      if (squared_distance(interpolate(a, b, t), ball.center) <= ball_reach) return false;
    }
  }
  return true;
}

// Every non-free voxel (cell) within reach of the segment blocks it.
bool octree_sweep_valid(const World& world, double r, const ValidityConfig& cfg, const State& a,
                        const State& b) {
  const OccupancyOctree& map = *world.octree();
  const double res = map.resolution();
  const double half_count = std::ldexp(1.0, static_cast<int>(map.max_depth()) - 1);
  const double reach = r + kSweepMargin;
  std::array<std::int64_t, 3> lo{};
  std::array<std::int64_t, 3> hi{};
  for (std::size_t i = 0; i < 3; ++i) {
    lo[i] = axis_key(std::min(a[i], b[i]) - reach, res, half_count);
    hi[i] = axis_key(std::max(a[i], b[i]) + reach, res, half_count);
  }
  const double reach2 = reach * reach;
  for (std::int64_t kz = lo[2]; kz <= hi[2]; ++kz) {
    for (std::int64_t ky = lo[1]; ky <= hi[1]; ++ky) {
      for (std::int64_t kx = lo[0]; kx <= hi[0]; ++kx) {
        if (!blocked(world.voxel(kx, ky, kz), cfg)) continue;
        const State vlo{(static_cast<double>(kx) - half_count) * res,
                        (static_cast<double>(ky) - half_count) * res,
                        (static_cast<double>(kz) - half_count) * res};
        const State vhi = vlo + State{res, res, res};
        if (squared_distance_segment_to_box(a, b, vlo, vhi) <= reach2) return false;
      }
    }
  }
  return true;
}

bool grid_sweep_valid(const World& world, double r, const ValidityConfig& cfg, const State& a,
                      const State& b) {
  const Grid2D& g = *world.grid();
  const double res = g.resolution();
  const double reach = r + kSweepMargin;
  const auto i0 = static_cast<std::int64_t>(std::floor((std::min(a[0], b[0]) - reach - g.x0()) / res));
  const auto i1 = static_cast<std::int64_t>(std::floor((std::max(a[0], b[0]) + reach - g.x0()) / res));
  const auto j0 = static_cast<std::int64_t>(std::floor((std::min(a[1], b[1]) - reach - g.y0()) / res));
  const auto j1 = static_cast<std::int64_t>(std::floor((std::max(a[1], b[1]) + reach - g.y0()) / res));
  const auto w = static_cast<std::int64_t>(g.width());
  const auto h = static_cast<std::int64_t>(g.height());
  const double reach2 = reach * reach;
  for (std::int64_t j = j0; j <= j1; ++j) {
    for (std::int64_t i = i0; i <= i1; ++i) {
      const Occupancy o = (i < 0 || j < 0 || i >= w || j >= h)
                              ? Occupancy::Unknown
                              : g.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (!blocked(o, cfg)) continue;
      const State clo{g.x0() + static_cast<double>(i) * res, g.y0() + static_cast<double>(j) * res};
      const State chi = clo + State{res, res};
      if (squared_distance_segment_to_box(a, b, clo, chi) <= reach2) return false;
    }
  }
  return true;
}

bool sweep_valid(const World& world, double r, const ValidityConfig& cfg, const State& a,
                 const State& b) {
  switch (world.kind()) {
    case World::Kind::Analytic:
      return analytic_sweep_valid(world, r, a, b);
    case World::Kind::Octree:
      return octree_sweep_valid(world, r, cfg, a, b);
    case World::Kind::Grid:
      return grid_sweep_valid(world, r, cfg, a, b);
  }
  return false;
}

}  // namespace

bool is_state_valid(const World& world, const RobotShape& shape, const ValidityConfig& cfg,
                    const State& x) {
  if (x.dim() != world.dim()) {
    throw std::invalid_argument("is_state_valid: state dimension differs from world");
  }
  if (!world.bounds().contains(x)) return false;
  switch (world.kind()) {
    case World::Kind::Analytic:
      return analytic_valid(world, shape.radius, x);
    case World::Kind::Octree:
      return octree_valid(world, shape.radius, cfg, x);
    case World::Kind::Grid:
      return grid_valid(world, shape.radius, cfg, x);
  }
  return false;
}

bool is_motion_valid(const World& world, const RobotShape& shape, const ValidityConfig& cfg,
                     const State& a, const State& b) {
  if (!(cfg.check_resolution > 0.0)) {
    throw std::invalid_argument("is_motion_valid: check_resolution must be positive");
  }
  // Canonical endpoint order makes the interpolated lattice order-independent.
  const bool swap = b < a;
  const State& from = swap ? b : a;
  const State& to = swap ? a : b;
  if (!is_state_valid(world, shape, cfg, from)) return false;
  if (from == to) return true;
  if (!is_state_valid(world, shape, cfg, to)) return false;
  const double len = distance(from, to).value();
  const auto steps = static_cast<std::size_t>(std::ceil(len / cfg.check_resolution));
  std::vector<State> lattice{from};
  for (std::size_t i = 1; i < steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps);
    lattice.push_back(interpolate(from, to, t));
    if (!is_state_valid(world, shape, cfg, lattice.back())) return false;
  }
  lattice.push_back(to);
  if (world.kind() == World::Kind::Analytic) return sweep_valid(world, shape.radius, cfg, from, to);
  for (std::size_t i = 0; i + 1 < lattice.size(); ++i) {
    if (!sweep_valid(world, shape.radius, cfg, lattice[i], lattice[i + 1])) return false;
  }
  return true;
}

ValidityChecker::ValidityChecker(std::shared_ptr<const World> world, RobotShape shape,
                                 ValidityConfig cfg)
    : world_(std::move(world)), shape_(shape), cfg_(cfg) {
  if (!world_) throw std::invalid_argument("ValidityChecker: null world");
  if (shape_.radius < 0.0) throw std::invalid_argument("RobotShape: negative radius");
  if (!(cfg_.check_resolution > 0.0)) {
    throw std::invalid_argument("ValidityConfig: check_resolution must be positive");
  }
}

}  // namespace octoplan
