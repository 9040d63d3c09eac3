#include "octoplan/grid_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>

namespace octoplan {

namespace {

constexpr std::size_t kMaxNodes = 50'000'000;

}  // namespace

GridOracleResult grid_oracle(const Scenario& scenario, double resolution) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("grid_oracle: resolution must be positive");
  }
  const World& world = *scenario.world;
  const Bounds& b = world.bounds();
  const std::size_t dim = b.dim();
  const RobotShape shape{scenario.robot_radius};
  const ValidityConfig& cfg = scenario.validity;

  GridOracleResult out;
  out.resolution = resolution;
  out.connectivity = dim == 2 ? 8 : 26;

  std::array<std::int64_t, 3> n{1, 1, 1};
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    n[i] = static_cast<std::int64_t>(std::floor(b.extent(i) / resolution + 1e-9)) + 1;
    total *= static_cast<std::size_t>(n[i]);
    if (total > kMaxNodes) throw std::invalid_argument("grid_oracle: lattice too large");
  }
  auto coords = [&](std::size_t idx) {
    std::array<double, 3> c{0, 0, 0};
    for (std::size_t i = 0; i < dim; ++i) {
      const auto k = static_cast<std::int64_t>(idx % static_cast<std::size_t>(n[i]));
      idx /= static_cast<std::size_t>(n[i]);
      c[i] = b.min()[i] + static_cast<double>(k) * resolution;
    }
    return State(std::span<const double>(c.data(), dim));
  };

  // Node ids: lattice nodes first, then start and goal.
  std::vector<char> valid(total, 0);
  for (std::size_t i = 0; i < total; ++i) {
    valid[i] = is_state_valid(world, shape, cfg, coords(i)) ? 1 : 0;
    out.valid_nodes += valid[i];
  }
  const std::size_t start_id = total;
  const std::size_t goal_id = total + 1;

  std::vector<std::array<std::int64_t, 3>> offsets;
  const std::int64_t zr = dim == 3 ? 1 : 0;
  for (std::int64_t dz = -zr; dz <= zr; ++dz) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        if (dx != 0 || dy != 0 || dz != 0) offsets.push_back({dx, dy, dz});
      }
    }
  }

  // Lattice nodes within one diagonal step of a free state.
  auto anchors = [&](const State& x) {
    std::vector<std::size_t> ids;
    std::array<std::int64_t, 3> lo{0, 0, 0};
    std::array<std::int64_t, 3> hi{0, 0, 0};
    for (std::size_t i = 0; i < dim; ++i) {
      const double f = (x[i] - b.min()[i]) / resolution;
      lo[i] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(f)) - 1);
      hi[i] = std::min<std::int64_t>(n[i] - 1, static_cast<std::int64_t>(std::ceil(f)) + 1);
    }
    const double reach = resolution * std::sqrt(static_cast<double>(dim)) * (1.0 + 1e-9);
    for (std::int64_t z = lo[2]; z <= hi[2]; ++z) {
      for (std::int64_t y = lo[1]; y <= hi[1]; ++y) {
        for (std::int64_t xk = lo[0]; xk <= hi[0]; ++xk) {
          const auto idx = static_cast<std::size_t>(xk + n[0] * (y + n[1] * z));
          if (!valid[idx]) continue;
          const State p = coords(idx);
          if (distance(p, x).value() <= reach && is_motion_valid(world, shape, cfg, x, p)) {
            ids.push_back(idx);
          }
        }
      }
    }
    return ids;
  };
  const std::vector<std::size_t> start_links = anchors(scenario.start);
  const std::vector<std::size_t> goal_links = anchors(scenario.goal);

  std::vector<double> dist(total + 2, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(total + 2, std::numeric_limits<std::size_t>::max());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[start_id] = 0.0;
  open.emplace(0.0, start_id);

  auto relax = [&](std::size_t from, std::size_t to, double w) {
    if (dist[from] + w < dist[to]) {
      dist[to] = dist[from] + w;
      parent[to] = from;
      open.emplace(dist[to], to);
    }
  };
  if (distance(scenario.start, scenario.goal).value() <= resolution &&
      is_motion_valid(world, shape, cfg, scenario.start, scenario.goal)) {
    relax(start_id, goal_id, distance(scenario.start, scenario.goal).value());
  }

  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    if (u == goal_id) break;
    if (u == start_id) {
      for (std::size_t v : start_links) {
        relax(u, v, distance(scenario.start, coords(v)).value());
      }
      continue;
    }
    const State pu = coords(u);
    if (std::find(goal_links.begin(), goal_links.end(), u) != goal_links.end()) {
      relax(u, goal_id, distance(pu, scenario.goal).value());
    }
    std::array<std::int64_t, 3> k{0, 0, 0};
    std::size_t rest = u;
    for (std::size_t i = 0; i < dim; ++i) {
      k[i] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(n[i]));
      rest /= static_cast<std::size_t>(n[i]);
    }
    for (const auto& o : offsets) {
      std::array<std::int64_t, 3> m{k[0] + o[0], k[1] + o[1], k[2] + o[2]};
      bool inside = true;
      for (std::size_t i = 0; i < 3; ++i) inside = inside && m[i] >= 0 && m[i] < n[i];
      if (!inside) continue;
      const auto v = static_cast<std::size_t>(m[0] + n[0] * (m[1] + n[1] * m[2]));
      if (!valid[v]) continue;
      const double w =
          resolution * std::sqrt(static_cast<double>(o[0] * o[0] + o[1] * o[1] + o[2] * o[2]));
      if (dist[u] + w >= dist[v]) continue;
      if (!is_motion_valid(world, shape, cfg, pu, coords(v))) continue;
      relax(u, v, w);
    }
  }

  if (std::isfinite(dist[goal_id])) {
    out.cost = Cost(dist[goal_id]);
    std::vector<State> rev{scenario.goal};
    for (std::size_t cur = parent[goal_id]; cur != start_id; cur = parent[cur]) {
      rev.push_back(coords(cur));
    }
    rev.push_back(scenario.start);
    out.path.assign(rev.rbegin(), rev.rend());
  }
  return out;
}

}  // namespace octoplan
