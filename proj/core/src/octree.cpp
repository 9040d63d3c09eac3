#include "octoplan/octree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <unordered_set>

namespace octoplan {

void LogOddsParams::validate() const {
  if (!(hit > 0.0 && miss < 0.0)) {
    throw std::invalid_argument("LogOddsParams: require hit > 0 > miss");
  }
  if (!(clamp_min < occupied_threshold && occupied_threshold < clamp_max)) {
    throw std::invalid_argument("LogOddsParams: require clamp_min < threshold < clamp_max");
  }
}

FormatError::FormatError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

struct OccupancyOctree::Node {
  float value = 0.0f;
  std::unique_ptr<std::array<std::unique_ptr<Node>, 8>> children;

  bool is_leaf() const noexcept { return children == nullptr; }

  std::unique_ptr<Node> clone() const {
    auto n = std::make_unique<Node>();
    n->value = value;
    if (children) {
      n->children = std::make_unique<std::array<std::unique_ptr<Node>, 8>>();
      for (std::size_t i = 0; i < 8; ++i) {
        if ((*children)[i]) (*n->children)[i] = (*children)[i]->clone();
      }
    }
    return n;
  }
};

namespace {

unsigned child_index(const VoxelKey& k, unsigned bit) noexcept {
  return ((k.x >> bit) & 1U) | (((k.y >> bit) & 1U) << 1) | (((k.z >> bit) & 1U) << 2);
}

template <typename NodeT, typename Fn>
void count_nodes(const NodeT* n, Fn&& fn) {
  if (!n) return;
  fn(*n);
  if (n->children) {
    for (const auto& c : *n->children) count_nodes(c.get(), fn);
  }
}

}  // namespace

OccupancyOctree::OccupancyOctree(double resolution, unsigned max_depth, LogOddsParams params)
    : resolution_(resolution), max_depth_(max_depth), params_(params) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("OccupancyOctree: resolution must be positive");
  }
  if (max_depth < 1 || max_depth > kMaxSupportedDepth) {
    throw std::invalid_argument("OccupancyOctree: max_depth must be in [1, 21]");
  }
  params_.validate();
}

OccupancyOctree::OccupancyOctree(const OccupancyOctree& other)
    : resolution_(other.resolution_),
      max_depth_(other.max_depth_),
      params_(other.params_),
      root_(other.root_ ? other.root_->clone() : nullptr) {}

OccupancyOctree& OccupancyOctree::operator=(const OccupancyOctree& other) {
  if (this != &other) {
    OccupancyOctree tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

OccupancyOctree::~OccupancyOctree() = default;
OccupancyOctree::OccupancyOctree(OccupancyOctree&&) noexcept = default;
OccupancyOctree& OccupancyOctree::operator=(OccupancyOctree&&) noexcept = default;

double OccupancyOctree::cube_side() const noexcept {
  return resolution_ * std::ldexp(1.0, static_cast<int>(max_depth_));
}

Bounds OccupancyOctree::cube_bounds() const {
  const double h = cube_side() / 2.0;
  return Bounds(State{-h, -h, -h}, State{h, h, h});
}

std::size_t OccupancyOctree::node_count() const noexcept {
  std::size_t n = 0;
  count_nodes(root_.get(), [&](const Node&) { ++n; });
  return n;
}

std::size_t OccupancyOctree::leaf_count() const noexcept {
  std::size_t n = 0;
  count_nodes(root_.get(), [&](const Node& node) { n += node.is_leaf() ? 1 : 0; });
  return n;
}

std::optional<VoxelKey> OccupancyOctree::key_of(const State& p) const noexcept {
  if (p.dim() != 3) return std::nullopt;
  const double half_count = std::ldexp(1.0, static_cast<int>(max_depth_) - 1);
  const double count = 2.0 * half_count;
  std::array<std::uint32_t, 3> k{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double idx = std::floor(p[i] / resolution_) + half_count;
    if (!(idx >= 0.0 && idx < count)) return std::nullopt;
    k[i] = static_cast<std::uint32_t>(idx);
  }
  return VoxelKey{k[0], k[1], k[2]};
}

State OccupancyOctree::key_center(const VoxelKey& k) const {
  const double half_count = std::ldexp(1.0, static_cast<int>(max_depth_) - 1);
  auto c = [&](std::uint32_t i) { return (static_cast<double>(i) - half_count + 0.5) * resolution_; };
  return State{c(k.x), c(k.y), c(k.z)};
}

float OccupancyOctree::clamp(double v) const noexcept {
  return static_cast<float>(std::clamp(v, params_.clamp_min, params_.clamp_max));
}

OccupancyOctree::Node& OccupancyOctree::leaf_for_update(const VoxelKey& k) {
  bool fresh = false;
  if (!root_) {
    root_ = std::make_unique<Node>();
    fresh = true;
  }
  Node* node = root_.get();
  for (unsigned depth = 0; depth < max_depth_; ++depth) {
    if (node->is_leaf()) {
      node->children = std::make_unique<std::array<std::unique_ptr<Node>, 8>>();
      if (!fresh) {
        // Expand a merged leaf back into eight copies of itself.
        for (auto& c : *node->children) {
          c = std::make_unique<Node>();
          c->value = node->value;
        }
      }
    }
    auto& child = (*node->children)[child_index(k, max_depth_ - 1 - depth)];
    if (!child) {
      child = std::make_unique<Node>();
      fresh = true;
    } else {
      fresh = false;
    }
    node = child.get();
  }
  return *node;
}

void OccupancyOctree::update(const VoxelKey& k, bool hit) {
  auto& leaf = leaf_for_update(k);
  leaf.value = clamp(static_cast<double>(leaf.value) + (hit ? params_.hit : params_.miss));
}

void OccupancyOctree::set_log_odds(const VoxelKey& k, double log_odds) {
  leaf_for_update(k).value = clamp(log_odds);
}

const OccupancyOctree::Node* OccupancyOctree::find(const VoxelKey& k,
                                                   unsigned* depth_out) const noexcept {
  const Node* node = root_.get();
  unsigned depth = 0;
  while (node && !node->is_leaf()) {
    node = (*node->children)[child_index(k, max_depth_ - 1 - depth)].get();
    ++depth;
  }
  if (depth_out) *depth_out = depth;
  return node;
}

std::optional<float> OccupancyOctree::log_odds(const VoxelKey& k) const noexcept {
  if (const Node* n = find(k)) return n->value;
  return std::nullopt;
}

std::optional<float> OccupancyOctree::log_odds(const State& p) const noexcept {
  if (auto k = key_of(p)) return log_odds(*k);
  return std::nullopt;
}

Occupancy OccupancyOctree::classify(float log_odds) const noexcept {
  return log_odds > params_.occupied_threshold ? Occupancy::Occupied : Occupancy::Free;
}

Occupancy OccupancyOctree::query(const VoxelKey& k) const noexcept {
  if (const Node* n = find(k)) return classify(n->value);
  return Occupancy::Unknown;
}

Occupancy OccupancyOctree::query(const State& p) const noexcept {
  if (auto k = key_of(p)) return query(*k);
  return Occupancy::Unknown;
}

namespace {

// Amanatides-Woo traversal over the leaf grid. Calls visit(key, t_entry) for
// every voxel in order, starting with the origin voxel at t = 0; stops when
// visit returns false or after `max_steps` voxels.
template <typename Center, typename Visit>
void traverse(const State& origin, const State& dir_unit, double resolution, VoxelKey start,
              Center&& center, std::size_t max_steps, Visit&& visit) {
  std::array<std::int64_t, 3> cur{start.x, start.y, start.z};
  std::array<int, 3> step{};
  std::array<double, 3> t_max{};
  std::array<double, 3> t_delta{};
  const State c0 = center(start);
  for (std::size_t i = 0; i < 3; ++i) {
    const double d = dir_unit[i];
    if (d > 0.0) {
      step[i] = 1;
      t_max[i] = (c0[i] + 0.5 * resolution - origin[i]) / d;
      t_delta[i] = resolution / d;
    } else if (d < 0.0) {
      step[i] = -1;
      t_max[i] = (c0[i] - 0.5 * resolution - origin[i]) / d;
      t_delta[i] = -resolution / d;
    } else {
      step[i] = 0;
      t_max[i] = std::numeric_limits<double>::infinity();
      t_delta[i] = std::numeric_limits<double>::infinity();
    }
  }
  double t_entry = 0.0;
  for (std::size_t n = 0; n < max_steps; ++n) {
    const VoxelKey key{static_cast<std::uint32_t>(cur[0]), static_cast<std::uint32_t>(cur[1]),
                       static_cast<std::uint32_t>(cur[2])};
    if (!visit(key, t_entry)) return;
    std::size_t axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    if (!std::isfinite(t_max[axis])) return;
    t_entry = t_max[axis];
    cur[axis] += step[axis];
    t_max[axis] += t_delta[axis];
    if (cur[axis] < 0 || cur[axis] > std::numeric_limits<std::uint32_t>::max()) return;
  }
}

}  // namespace

std::vector<VoxelKey> OccupancyOctree::ray_keys(const State& origin, const State& end) const {
  auto k0 = key_of(origin);
  auto k1 = key_of(end);
  if (!k0 || !k1) throw std::invalid_argument("ray_keys: endpoint outside the map cube");
  std::vector<VoxelKey> keys;
  if (*k0 == *k1) return keys;
  const double length = distance(origin, end).value();
  const State dir = (end - origin) * (1.0 / length);
  auto span = [](std::uint32_t a, std::uint32_t b) {
    return static_cast<std::size_t>(a > b ? a - b : b - a);
  };
  const std::size_t max_steps = span(k0->x, k1->x) + span(k0->y, k1->y) + span(k0->z, k1->z) + 1;
  const double limit = length + resolution_;
  traverse(origin, dir, resolution_, *k0,
           [&](const VoxelKey& k) { return key_center(k); }, max_steps,
           [&](const VoxelKey& k, double t) {
             if (k == *k1 || t > limit) return false;
             keys.push_back(k);
             return true;
           });
  return keys;
}

void OccupancyOctree::insert_scan(const PosedScan& scan) {
  if (scan.points.empty()) return;
  if (!key_of(scan.origin)) {
    throw std::invalid_argument("insert_scan: scan origin outside the map cube");
  }
  const double half = cube_side() / 2.0;
  // Stay a hair inside the half-open cube when clipping.
  const double inner = half - resolution_ * 1e-6;

  std::unordered_set<VoxelKey, VoxelKeyHash> hits;
  std::unordered_set<VoxelKey, VoxelKeyHash> misses;
  for (const State& p : scan.points) {
    if (p.dim() != 3) throw std::invalid_argument("insert_scan: points must be 3D");
    const double len = distance(scan.origin, p).value();
    State end = p;
    bool truncated = false;
    if (len > scan.max_range) {
      end = scan.origin + (p - scan.origin) * (scan.max_range / len);
      truncated = true;
    }
    if (!key_of(end)) {
      // Clip the segment at the cube boundary.
      const State d = end - scan.origin;
      double t_exit = 1.0;
      for (std::size_t i = 0; i < 3; ++i) {
        if (d[i] > 0.0) t_exit = std::min(t_exit, (inner - scan.origin[i]) / d[i]);
        if (d[i] < 0.0) t_exit = std::min(t_exit, (-inner - scan.origin[i]) / d[i]);
      }
      end = scan.origin + d * std::max(0.0, t_exit);
      truncated = true;
      if (!key_of(end)) continue;
    }
    for (const auto& k : ray_keys(scan.origin, end)) misses.insert(k);
    if (!truncated) hits.insert(*key_of(end));
  }
  for (const auto& k : hits) update(k, true);
  for (const auto& k : misses) {
    if (!hits.contains(k)) update(k, false);
  }
}

namespace {

template <typename NodeT>
void prune_node(NodeT& n) {
  if (n.is_leaf()) return;
  bool mergeable = true;
  for (auto& c : *n.children) {
    if (c) prune_node(*c);
    if (!c || !c->is_leaf()) mergeable = false;
  }
  if (!mergeable) return;
  const float v = (*n.children)[0]->value;
  for (const auto& c : *n.children) {
    if (c->value != v) return;
  }
  n.children.reset();
  n.value = v;
}

}  // namespace

void OccupancyOctree::prune() {
  if (root_) prune_node(*root_);
}

std::optional<State> OccupancyOctree::cast_ray(const State& origin, const State& direction,
                                               double max_range) const {
  if (origin.dim() != 3 || direction.dim() != 3) {
    throw std::invalid_argument("cast_ray: origin and direction must be 3D");
  }
  const double norm = std::sqrt(squared_distance(direction, State{0.0, 0.0, 0.0}));
  if (std::abs(norm - 1.0) > 1e-9) throw std::invalid_argument("cast_ray: direction must be unit");
  if (!(max_range > 0.0)) throw std::invalid_argument("cast_ray: max_range must be positive");
  auto k0 = key_of(origin);
  if (!k0 || !root_) return std::nullopt;
  const std::size_t max_steps =
      3 * (static_cast<std::size_t>(std::ceil(max_range / resolution_)) + 2);
  std::optional<State> hit;
  traverse(origin, direction, resolution_, *k0,
           [&](const VoxelKey& k) { return key_center(k); }, max_steps,
           [&](const VoxelKey& k, double t) {
             if (t > max_range) return false;
             const std::uint32_t limit = 1U << max_depth_;
             if (k.x >= limit || k.y >= limit || k.z >= limit) return false;
             if (query(k) == Occupancy::Occupied) {
               hit = key_center(k);
               return false;
             }
             return true;
           });
  return hit;
}

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'V', 'O', 'X', '1'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  const U u = std::bit_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

  template <typename T>
  T get(const char* what) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
    if (pos_ + sizeof(U) > bytes_.size()) {
      throw FormatError(std::string("truncated stream reading ") + what, pos_);
    }
    U u = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) u |= static_cast<U>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return std::bit_cast<T>(u);
  }

  std::size_t pos() const noexcept { return pos_; }
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> OccupancyOctree::serialize() const {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put_le(out, resolution_);
  out.push_back(static_cast<std::uint8_t>(max_depth_));
  auto write = [&](auto&& self, const Node& n) -> void {
    std::uint8_t mask = 0;
    if (n.children) {
      for (std::size_t i = 0; i < 8; ++i) {
        if ((*n.children)[i]) mask |= static_cast<std::uint8_t>(1U << i);
      }
    }
    out.push_back(mask);
    if (mask == 0) {
      put_le(out, n.value);
      return;
    }
    for (std::size_t i = 0; i < 8; ++i) {
      if (mask & (1U << i)) self(self, *(*n.children)[i]);
    }
  };
  if (root_) write(write, *root_);
  return out;
}

OccupancyOctree OccupancyOctree::deserialize(std::span<const std::uint8_t> bytes,
                                             LogOddsParams params) {
  Reader r(bytes);
  for (std::size_t i = 0; i < kMagic.size(); ++i) {
    if (r.get<std::uint8_t>("magic") != kMagic[i]) throw FormatError("bad magic", i);
  }
  const std::size_t res_at = r.pos();
  const auto resolution = r.get<double>("resolution");
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw FormatError("resolution must be positive", res_at);
  }
  const std::size_t depth_at = r.pos();
  const auto depth = r.get<std::uint8_t>("max_depth");
  if (depth < 1 || depth > kMaxSupportedDepth) throw FormatError("max_depth out of range", depth_at);

  OccupancyOctree map(resolution, depth, params);
  if (r.done()) return map;

  auto read = [&](auto&& self, unsigned level) -> std::unique_ptr<Node> {
    auto n = std::make_unique<Node>();
    const std::size_t mask_at = r.pos();
    const auto mask = r.get<std::uint8_t>("child mask");
    if (mask == 0) {
      const std::size_t value_at = r.pos();
      n->value = r.get<float>("log-odds");
      if (!std::isfinite(n->value)) throw FormatError("non-finite log-odds", value_at);
      return n;
    }
    if (level >= map.max_depth_) throw FormatError("children below leaf depth", mask_at);
    n->children = std::make_unique<std::array<std::unique_ptr<Node>, 8>>();
    for (std::size_t i = 0; i < 8; ++i) {
      if (mask & (1U << i)) (*n->children)[i] = self(self, level + 1);
    }
    return n;
  };
  map.root_ = read(read, 0);
  if (!r.done()) throw FormatError("trailing bytes after node stream", r.pos());
  return map;
}

void OccupancyOctree::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

OccupancyOctree OccupancyOctree::load(const std::filesystem::path& path, LogOddsParams params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes, params);
}

void OccupancyOctree::for_each_leaf(const LeafVisitor& visit) const {
  if (!root_) return;
  const double half = cube_side() / 2.0;
  auto walk = [&](auto&& self, const Node& n, std::array<double, 3> lo, double size) -> void {
    if (n.is_leaf()) {
      visit(State{lo[0], lo[1], lo[2]}, State{lo[0] + size, lo[1] + size, lo[2] + size}, n.value);
      return;
    }
    const double h = size / 2.0;
    for (unsigned i = 0; i < 8; ++i) {
      const auto& c = (*n.children)[i];
      if (!c) continue;
      std::array<double, 3> clo{lo[0] + ((i & 1U) ? h : 0.0), lo[1] + ((i & 2U) ? h : 0.0),
                                lo[2] + ((i & 4U) ? h : 0.0)};
      self(self, *c, clo, h);
    }
  };
  walk(walk, *root_, {-half, -half, -half}, cube_side());
}

Grid2D OccupancyOctree::cross_section(double height, double resolution_2d) const {
  if (!(resolution_2d >= resolution_)) {
    throw std::invalid_argument("cross_section: 2D resolution finer than the map resolution");
  }
  double x_min = std::numeric_limits<double>::infinity();
  double y_min = x_min;
  double x_max = -x_min;
  double y_max = -x_min;
  for_each_leaf([&](const State& lo, const State& hi, float) {
    x_min = std::min(x_min, lo[0]);
    y_min = std::min(y_min, lo[1]);
    x_max = std::max(x_max, hi[0]);
    y_max = std::max(y_max, hi[1]);
  });
  if (!std::isfinite(x_min)) return Grid2D(0.0, 0.0, resolution_2d, 0, 0);
  return cross_section(height, resolution_2d, x_min, y_min, x_max, y_max);
}

Grid2D OccupancyOctree::cross_section(double height, double resolution_2d, double x_min,
                                      double y_min, double x_max, double y_max) const {
  if (!(resolution_2d >= resolution_)) {
    throw std::invalid_argument("cross_section: 2D resolution finer than the map resolution");
  }
  if (!(x_max > x_min && y_max > y_min)) {
    throw std::invalid_argument("cross_section: empty xy window");
  }
  const double x0 = std::floor(x_min / resolution_2d) * resolution_2d;
  const double y0 = std::floor(y_min / resolution_2d) * resolution_2d;
  const auto w = static_cast<std::size_t>(std::ceil((x_max - x0) / resolution_2d - 1e-9));
  const auto h = static_cast<std::size_t>(std::ceil((y_max - y0) / resolution_2d - 1e-9));
  Grid2D grid(x0, y0, resolution_2d, w, h, Occupancy::Unknown);
  const double eps = resolution_ / 2.0;
  const double z_lo = height - eps;
  const double z_hi = height + eps;

  // Cells whose open interval overlaps the open interval (lo, hi).
  auto cell_range = [&](double lo, double hi, double origin, std::size_t count)
      -> std::pair<std::size_t, std::size_t> {
    const double a = std::floor((lo - origin) / resolution_2d);
    const double b = std::ceil((hi - origin) / resolution_2d);
    const double first = std::max(0.0, a);
    const double last = std::min(static_cast<double>(count), b);
    if (!(last > first)) return {0, 0};
    return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
  };

  for_each_leaf([&](const State& lo, const State& hi, float value) {
    if (!(lo[2] < z_hi && hi[2] > z_lo)) return;
    const Occupancy occ = classify(value);
    auto [i0, i1] = cell_range(lo[0], hi[0], x0, w);
    auto [j0, j1] = cell_range(lo[1], hi[1], y0, h);
    for (std::size_t j = j0; j < j1; ++j) {
      for (std::size_t i = i0; i < i1; ++i) {
        // Strict overlap: the leaf must cover part of the cell's interior.
        const double cx0 = x0 + static_cast<double>(i) * resolution_2d;
        const double cy0 = y0 + static_cast<double>(j) * resolution_2d;
        if (!(lo[0] < cx0 + resolution_2d && hi[0] > cx0 && lo[1] < cy0 + resolution_2d &&
              hi[1] > cy0)) {
          continue;
        }
        const Occupancy cur = grid.at(i, j);
        if (occ == Occupancy::Occupied || cur == Occupancy::Unknown) grid.set(i, j, occ);
      }
    }
  });
  return grid;
}

}  // namespace octoplan
