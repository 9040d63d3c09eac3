#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "octoplan/geometry.hpp"

namespace octoplan {

/// Uniform bucket grid over states for radius and nearest-neighbor queries.
/// Iteration order is deterministic: cells are visited in a fixed offset
/// order and entries within a cell in insertion order.
class SpatialHash {
 public:
  explicit SpatialHash(double cell_size = 1.0) { reset(cell_size); }

  void reset(double cell_size);
  double cell_size() const noexcept { return cell_; }
  std::size_t size() const noexcept { return count_; }

  void insert(int id, const State& x);

  /// Calls f(id, squared_distance) for every entry within distance r of x.
  template <typename F>
  void for_each_within(const State& x, double r, F&& f) const;

  /// Entry minimizing distance to x; ties go to the earlier-inserted entry.
  std::optional<int> nearest(const State& x) const;

 private:
  struct CellKey {
    std::int64_t c[3];
    bool operator==(const CellKey& o) const noexcept {
      return c[0] == o.c[0] && c[1] == o.c[1] && c[2] == o.c[2];
    }
  };
  struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const noexcept {
      auto h = static_cast<std::uint64_t>(k.c[0]) * 0x9E3779B97F4A7C15ULL;
      h ^= static_cast<std::uint64_t>(k.c[1]) * 0xC2B2AE3D27D4EB4FULL;
      h ^= static_cast<std::uint64_t>(k.c[2]) * 0x165667B19E3779F9ULL;
      return static_cast<std::size_t>(h ^ (h >> 31));
    }
  };
  struct Entry {
    int id;
    std::uint64_t order;
    State x;
  };

  CellKey key_of(const State& x) const noexcept;

  double cell_ = 1.0;
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::unordered_map<CellKey, std::vector<Entry>, CellKeyHash> cells_;
  std::vector<const std::vector<Entry>*> nonempty_;
};

template <typename F>
void SpatialHash::for_each_within(const State& x, double r, F&& f) const {
  if (count_ == 0) return;
  const double r2 = r * r;
  std::int64_t lo[3] = {0, 0, 0};
  std::int64_t hi[3] = {0, 0, 0};
  double span = 1.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    lo[i] = static_cast<std::int64_t>(std::floor((x[i] - r) / cell_));
    hi[i] = static_cast<std::int64_t>(std::floor((x[i] + r) / cell_));
    span *= static_cast<double>(hi[i] - lo[i] + 1);
  }
  if (span > static_cast<double>(nonempty_.size())) {
    // Fewer occupied cells than cells in range: scan the occupied ones.
    for (const auto* bucket : nonempty_) {
      for (const auto& e : *bucket) {
        const double d2 = squared_distance(x, e.x);
        if (d2 <= r2) f(e.id, d2);
      }
    }
    return;
  }
  CellKey k{{0, 0, 0}};
  for (std::int64_t cz = lo[2]; cz <= hi[2]; ++cz) {
    k.c[2] = cz;
    for (std::int64_t cy = lo[1]; cy <= hi[1]; ++cy) {
      k.c[1] = cy;
      for (std::int64_t cx = lo[0]; cx <= hi[0]; ++cx) {
        k.c[0] = cx;
        auto it = cells_.find(k);
        if (it == cells_.end()) continue;
        for (const auto& e : it->second) {
          const double d2 = squared_distance(x, e.x);
          if (d2 <= r2) f(e.id, d2);
        }
      }
    }
  }
}

}  // namespace octoplan
