#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "octoplan/octree.hpp"
#include "octoplan/random.hpp"

using namespace octoplan;

namespace {

// Fine-step march along the segment; collects every voxel it lands in.
std::set<VoxelKey> march(const OccupancyOctree& m, const State& a, const State& b) {
  std::set<VoxelKey> keys;
  const double len = distance(a, b).value();
  const auto steps = static_cast<std::size_t>(std::ceil(len / (m.resolution() * 1e-4)));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = steps == 0 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps);
    keys.insert(*m.key_of(interpolate(a, b, t)));
  }
  keys.erase(*m.key_of(b));
  return keys;
}

// Length of the segment inside the voxel, or a negative value if it misses.
double overlap(const OccupancyOctree& m, const State& a, const State& b, const VoxelKey& k) {
  const State c = m.key_center(k);
  const double r = m.resolution() / 2.0;
  double t0 = 0.0, t1 = 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double d = b[i] - a[i];
    const double lo = c[i] - r - a[i], hi = c[i] + r - a[i];
    if (d == 0.0) {
      if (lo > 0.0 || hi < 0.0) return -1.0;
      continue;
    }
    double u = lo / d, v = hi / d;
    if (u > v) std::swap(u, v);
    t0 = std::max(t0, u);
    t1 = std::min(t1, v);
  }
  return (t1 - t0) * distance(a, b).value();
}

State random_point(RandomSource& rng, double lo, double hi) {
  return State{rng.draw_uniform(lo, hi), rng.draw_uniform(lo, hi), rng.draw_uniform(lo, hi)};
}

OccupancyOctree random_map(std::uint64_t seed, std::size_t scans) {
  RandomSource rng(seed);
  OccupancyOctree m(0.1, 8);
  for (std::size_t s = 0; s < scans; ++s) {
    PosedScan scan;
    scan.origin = random_point(rng, -2.0, 2.0);
    scan.max_range = 3.0;
    for (int i = 0; i < 20; ++i) scan.points.push_back(random_point(rng, -3.0, 3.0));
    m.insert_scan(scan);
  }
  return m;
}

}  // namespace

TEST_CASE("log-odds parameter validation") {
  CHECK_NOTHROW(LogOddsParams{}.validate());
  LogOddsParams p;
  p.hit = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.occupied_threshold = 5.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(OccupancyOctree(0.0), std::invalid_argument);
  CHECK_THROWS_AS(OccupancyOctree(0.1, 22), std::invalid_argument);
}

TEST_CASE("query on empty map is unknown") {
  OccupancyOctree m(0.1);
  CHECK(m.empty());
  CHECK(m.query(State{0.3, 0.1, -4.0}) == Occupancy::Unknown);
  CHECK(m.query(State{1e9, 0, 0}) == Occupancy::Unknown);
}

TEST_CASE("hits and misses follow log-odds sums") {
  OccupancyOctree m(0.1);
  const auto k = *m.key_of(State{0.05, 0.05, 0.05});
  m.update(k, true);
  CHECK(*m.log_odds(k) == doctest::Approx(0.85));
  CHECK(m.query(k) == Occupancy::Occupied);
  for (int i = 0; i < 3; ++i) m.update(k, false);
  CHECK(*m.log_odds(k) == doctest::Approx(0.85 - 3 * 0.4));
  CHECK(m.query(k) == Occupancy::Free);
}

TEST_CASE("single ray insert matches a hand ray-march") {
  OccupancyOctree m(0.1, 16);
  const State o{0.05, 0.05, 0.05};
  const State end{1.05, 0.05, 0.05};
  const std::set<VoxelKey> expected_miss = march(m, o, end);
  CHECK(expected_miss.size() == 10);

  m.insert_scan(PosedScan{o, {end}, 10.0});
  CHECK(*m.log_odds(end) == doctest::Approx(0.85));
  for (const auto& k : expected_miss) CHECK(*m.log_odds(k) == doctest::Approx(-0.4));

  m.insert_scan(PosedScan{o, {end}, 10.0});
  CHECK(*m.log_odds(end) == doctest::Approx(2 * 0.85));

  // Ray/insert consistency.
  const auto hit = m.cast_ray(o, State{1, 0, 0}, 5.0);
  REQUIRE(hit);
  CHECK(*m.key_of(*hit) == *m.key_of(end));
}

TEST_CASE("empty scan leaves the map unchanged") {
  OccupancyOctree m = random_map(1, 3);
  const auto before = m.serialize();
  m.insert_scan(PosedScan{State{0, 0, 0}, {}, 5.0});
  CHECK(m.serialize() == before);
}

TEST_CASE("one update per voxel per scan, hits win") {
  OccupancyOctree m(0.1);
  const State o{0.05, 0.05, 0.05};
  // The second ray passes through the first ray's endpoint.
  m.insert_scan(PosedScan{o, {State{0.55, 0.05, 0.05}, State{1.05, 0.05, 0.05}}, 10.0});
  CHECK(*m.log_odds(State{0.55, 0.05, 0.05}) == doctest::Approx(0.85));
  CHECK(*m.log_odds(State{0.25, 0.05, 0.05}) == doctest::Approx(-0.4));
}

TEST_CASE("range-truncated points only clear space") {
  OccupancyOctree m(0.1);
  const State o{0.05, 0.05, 0.05};
  m.insert_scan(PosedScan{o, {State{5.05, 0.05, 0.05}}, 1.0});
  CHECK(m.query(State{0.55, 0.05, 0.05}) == Occupancy::Free);
  CHECK(m.query(State{5.05, 0.05, 0.05}) == Occupancy::Unknown);
  CHECK(m.query(State{1.55, 0.05, 0.05}) == Occupancy::Unknown);
}

TEST_CASE("insert_scan rejects an origin outside the cube") {
  OccupancyOctree m(0.1, 4);  // cube side 1.6
  CHECK_THROWS_AS(m.insert_scan(PosedScan{State{5, 0, 0}, {State{0, 0, 0}}, 10.0}),
                  std::invalid_argument);
}

TEST_CASE("property: ray traversal equals the exact voxel set") {
  RandomSource rng(11);
  OccupancyOctree m(0.1, 10);
  const double tol = 1e-9;
  for (int i = 0; i < 300; ++i) {
    const State a = random_point(rng, -3.0, 3.0);
    const State b = random_point(rng, -3.0, 3.0);
    const auto keys = m.ray_keys(a, b);
    const std::set<VoxelKey> got(keys.begin(), keys.end());
    REQUIRE(got.size() == keys.size());
    const VoxelKey ka = *m.key_of(a), kb = *m.key_of(b);
    REQUIRE_FALSE(got.contains(kb));
    if (ka != kb) REQUIRE(got.contains(ka));
    // Every voxel the segment crosses by more than tol, except the end voxel.
    for (std::uint32_t x = std::min(ka.x, kb.x); x <= std::max(ka.x, kb.x); ++x)
      for (std::uint32_t y = std::min(ka.y, kb.y); y <= std::max(ka.y, kb.y); ++y)
        for (std::uint32_t z = std::min(ka.z, kb.z); z <= std::max(ka.z, kb.z); ++z) {
          const VoxelKey k{x, y, z};
          if (k == kb) continue;
          const double len = overlap(m, a, b, k);
          if (len > tol) REQUIRE(got.contains(k));
          if (len < -tol) REQUIRE_FALSE(got.contains(k));
        }
    for (const auto& k : got) REQUIRE(overlap(m, a, b, k) >= -tol);
  }
}

TEST_CASE("cast_ray examples") {
  OccupancyOctree m(0.1);
  CHECK_FALSE(m.cast_ray(State{0, 0, 0}, State{1, 0, 0}, 5.0));

  m.set_log_odds(*m.key_of(State{0.95, 0.05, 0.05}), 3.5);
  const auto hit = m.cast_ray(State{0.0, 0.0, 0.0}, State{1, 0, 0}, 5.0);
  REQUIRE(hit);
  CHECK((*hit)[0] == doctest::Approx(0.95));
  CHECK((*hit)[1] == doctest::Approx(0.05));
  CHECK((*hit)[2] == doctest::Approx(0.05));
  CHECK_FALSE(m.cast_ray(State{0.0, 0.0, 0.0}, State{1, 0, 0}, 0.5));

  const auto self = m.cast_ray(State{0.93, 0.02, 0.08}, State{0, 0, 1}, 1.0);
  REQUIRE(self);
  CHECK(*m.key_of(*self) == *m.key_of(State{0.95, 0.05, 0.05}));
}

TEST_CASE("unknown voxels do not stop cast rays") {
  OccupancyOctree m(0.1);
  m.set_log_odds(*m.key_of(State{2.05, 0.05, 0.05}), 3.5);
  CHECK(m.query(State{1.05, 0.05, 0.05}) == Occupancy::Unknown);
  CHECK(m.cast_ray(State{0.05, 0.05, 0.05}, State{1, 0, 0}, 5.0));
}

TEST_CASE("clamping holds under arbitrary update sequences") {
  RandomSource rng(5);
  OccupancyOctree m(0.1, 6);
  for (int i = 0; i < 20000; ++i) {
    VoxelKey k{static_cast<std::uint32_t>(rng.draw_index(4)),
               static_cast<std::uint32_t>(rng.draw_index(4)),
               static_cast<std::uint32_t>(rng.draw_index(4))};
    m.update(k, rng.draw_uniform() < 0.5);
  }
  m.for_each_leaf([&](const State&, const State&, float v) {
    REQUIRE(v >= -2.0f);
    REQUIRE(v <= 3.5f);
  });
}

TEST_CASE("saturated 2x2x2 block collapses to one node") {
  OccupancyOctree m(0.1, 1);
  for (std::uint32_t x = 0; x < 2; ++x)
    for (std::uint32_t y = 0; y < 2; ++y)
      for (std::uint32_t z = 0; z < 2; ++z)
        for (int i = 0; i < 10; ++i) m.update(VoxelKey{x, y, z}, true);
  CHECK(m.node_count() == 9);
  m.prune();
  CHECK(m.node_count() == 1);
  CHECK(m.leaf_count() == 1);
  CHECK(m.query(State{-0.05, 0.05, -0.05}) == Occupancy::Occupied);
}

TEST_CASE("saturated block collapses through several levels") {
  OccupancyOctree m(0.1, 6);
  // The 4x4x4 block at keys [32, 36) is aligned to depth-4 nodes.
  for (std::uint32_t x = 32; x < 36; ++x)
    for (std::uint32_t y = 32; y < 36; ++y)
      for (std::uint32_t z = 32; z < 36; ++z) m.set_log_odds(VoxelKey{x, y, z}, 3.5);
  m.prune();
  CHECK(m.leaf_count() == 1);
  // Root plus one child per level down to the merged leaf at depth 4.
  CHECK(m.node_count() == 5);
}

TEST_CASE("heterogeneous children are not merged") {
  OccupancyOctree m(0.1, 1);
  for (std::uint32_t i = 0; i < 8; ++i) {
    m.set_log_odds(VoxelKey{i & 1U, (i >> 1) & 1U, (i >> 2) & 1U}, i == 0 ? 1.0 : 2.0);
  }
  const std::size_t before = m.node_count();
  m.prune();
  CHECK(m.node_count() == before);

  OccupancyOctree e(0.1);
  e.prune();
  CHECK(e.empty());
}

TEST_CASE("property: prune preserves queries") {
  OccupancyOctree m = random_map(2, 40);
  OccupancyOctree p = m;
  p.prune();
  CHECK(p.node_count() <= m.node_count());
  RandomSource rng(9);
  for (int i = 0; i < 10000; ++i) {
    const State x = random_point(rng, -6.4, 6.4);
    REQUIRE(p.query(x) == m.query(x));
  }
}

TEST_CASE("serialization format and round-trip") {
  OccupancyOctree e(0.25, 5);
  const auto header = e.serialize();
  REQUIRE(header.size() == 13);
  CHECK(std::equal(header.begin(), header.begin() + 4, "VOX1"));
  CHECK(header[12] == 5);
  const auto back = OccupancyOctree::deserialize(header);
  CHECK(back.empty());
  CHECK(back.resolution() == 0.25);

  OccupancyOctree m = random_map(3, 100);
  const auto bytes = m.serialize();
  const auto r = OccupancyOctree::deserialize(bytes);
  CHECK(r.serialize() == bytes);
  RandomSource rng(4);
  for (int i = 0; i < 1000; ++i) {
    const State x = random_point(rng, -6.4, 6.4);
    REQUIRE(r.query(x) == m.query(x));
  }
}

TEST_CASE("malformed streams raise FormatError with offsets") {
  OccupancyOctree m = random_map(6, 5);
  auto bytes = m.serialize();

  auto bad_magic = bytes;
  bad_magic[2] = 'Z';
  try {
    (void)OccupancyOctree::deserialize(bad_magic);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 2);
  }

  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  CHECK_THROWS_AS((void)OccupancyOctree::deserialize(truncated), FormatError);

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS((void)OccupancyOctree::deserialize(trailing), FormatError);

  std::vector<std::uint8_t> tiny{'V', 'O'};
  CHECK_THROWS_AS((void)OccupancyOctree::deserialize(tiny), FormatError);
}

TEST_CASE("cross_section of a single voxel") {
  OccupancyOctree m(0.1);
  m.set_log_odds(*m.key_of(State{0.35, 0.45, 0.75}), 3.5);
  const Grid2D g = m.cross_section(0.75, 0.1);
  CHECK(g.count(Occupancy::Occupied) == 1);
  CHECK(g.query(0.35, 0.45) == Occupancy::Occupied);
  const Grid2D above = m.cross_section(2.0, 0.1);
  CHECK(above.count(Occupancy::Occupied) == 0);
  CHECK(above.count(Occupancy::Unknown) == above.width() * above.height());
  CHECK_THROWS_AS((void)m.cross_section(0.75, 0.05), std::invalid_argument);
}

TEST_CASE("table top above the slice height is absent") {
  OccupancyOctree m(0.05, 8);
  // Free floor-level space up to 0.7, table top slab at [0.7, 0.75).
  for (double x = 0.025; x < 1.0; x += 0.05) {
    for (double y = 0.025; y < 1.0; y += 0.05) {
      for (double z = 0.025; z < 0.7; z += 0.05) m.set_log_odds(*m.key_of(State{x, y, z}), -2.0);
      m.set_log_odds(*m.key_of(State{x, y, 0.725}), 3.5);
    }
  }
  const Grid2D low = m.cross_section(0.3, 0.05);
  CHECK(low.count(Occupancy::Occupied) == 0);
  CHECK(low.count(Occupancy::Free) == 400);
  const Grid2D top = m.cross_section(0.725, 0.05);
  CHECK(top.count(Occupancy::Occupied) == 400);
}
