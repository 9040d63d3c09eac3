#include "octoplan/spatial_hash.hpp"

#include <stdexcept>

namespace octoplan {

void SpatialHash::reset(double cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw std::invalid_argument("SpatialHash: cell size must be positive and finite");
  }
  cell_ = cell_size;
  dim_ = 0;
  count_ = 0;
  cells_.clear();
  nonempty_.clear();
}

SpatialHash::CellKey SpatialHash::key_of(const State& x) const noexcept {
  CellKey k{{0, 0, 0}};
  for (std::size_t i = 0; i < x.dim(); ++i) {
    k.c[i] = static_cast<std::int64_t>(std::floor(x[i] / cell_));
  }
  return k;
}

void SpatialHash::insert(int id, const State& x) {
  if (dim_ == 0) dim_ = x.dim();
  if (x.dim() != dim_) throw std::invalid_argument("SpatialHash: dimension mismatch");
  auto [it, inserted] = cells_.try_emplace(key_of(x));
  if (inserted) nonempty_.push_back(&it->second);
  it->second.push_back(Entry{id, count_, x});
  ++count_;
}

std::optional<int> SpatialHash::nearest(const State& x) const {
  if (count_ == 0) return std::nullopt;
  double best_d2 = std::numeric_limits<double>::infinity();
  std::uint64_t best_order = 0;
  int best_id = -1;
  auto consider = [&](const Entry& e) {
    const double d2 = squared_distance(x, e.x);
    if (d2 < best_d2 || (d2 == best_d2 && e.order < best_order)) {
      best_d2 = d2;
      best_order = e.order;
      best_id = e.id;
    }
  };
  auto scan_all = [&] {
    for (const auto* bucket : nonempty_) {
      for (const auto& e : *bucket) consider(e);
    }
  };

  const CellKey center = key_of(x);
  for (std::int64_t ring = 0;; ++ring) {
    std::size_t side = static_cast<std::size_t>(2 * ring + 1);
    std::size_t cube = 1;
    for (std::size_t i = 0; i < dim_; ++i) cube *= side;
    if (cube > 2 * nonempty_.size()) {
      scan_all();
      return best_id;
    }
    CellKey k{{0, 0, 0}};
    const std::int64_t zr = dim_ == 3 ? ring : 0;
    for (std::int64_t dz = -zr; dz <= zr; ++dz) {
      for (std::int64_t dy = -ring; dy <= ring; ++dy) {
        for (std::int64_t dx = -ring; dx <= ring; ++dx) {
          const std::int64_t cheb = std::max({std::abs(dx), std::abs(dy), std::abs(dz)});
          if (cheb != ring) continue;
          k.c[0] = center.c[0] + dx;
          k.c[1] = center.c[1] + dy;
          k.c[2] = center.c[2] + dz;
          auto it = cells_.find(k);
          if (it == cells_.end()) continue;
          for (const auto& e : it->second) consider(e);
        }
      }
    }
    // Anything in ring + 1 or beyond is at least ring * cell away.
    if (best_id >= 0) {
      const double reach = static_cast<double>(ring) * cell_;
      if (best_d2 < reach * reach) return best_id;
    }
  }
}

}  // namespace octoplan
