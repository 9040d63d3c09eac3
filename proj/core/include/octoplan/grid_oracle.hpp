#pragma once

#include <vector>

#include "octoplan/geometry.hpp"
#include "octoplan/scenario.hpp"

namespace octoplan {

struct GridOracleResult {
  double resolution = 0.0;
  /// Infinite when start and goal are not connected on the lattice.
  Cost cost = Cost::infinite();
  /// 8-connected in 2D, 26-connected in 3D.
  std::size_t connectivity = 0;
  std::vector<State> path;
  std::size_t valid_nodes = 0;
};

/// Dijkstra over the regular lattice of spacing `resolution` anchored at the
/// lower bounds corner. Lattice edges and the links joining start and goal to
/// lattice nodes within one diagonal step must pass is_motion_valid and cost
/// their Euclidean length. Throws std::invalid_argument for a non-positive
/// resolution or a lattice over 50 million nodes.
GridOracleResult grid_oracle(const Scenario& scenario, double resolution);

}  // namespace octoplan
