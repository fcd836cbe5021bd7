#pragma once

#include <vector>

#include "dias/geometry.hpp"

namespace dias {

/// Grid-rasterized Voronoi partition of the domain by robot positions,
/// plus the robot adjacency graph induced by shared cell boundaries.
/// Equidistant grid cells go to the lowest robot index.
struct Tessellation {
  std::vector<Vec2> generators;
  std::vector<int> cell_of_grid;             // row-major, one owner per grid cell
  std::vector<std::vector<int>> adjacency;   // sorted neighbor lists, symmetric
  Domain domain;

  int owner(int grid_idx) const { return cell_of_grid[static_cast<std::size_t>(grid_idx)]; }
};

/// Nearest-generator assignment of every grid cell (l2 distance, low-index
/// tie-break). Coincident generators are perturbed by 1e-9 to keep them
/// distinct. Neighbors are robots whose cells share a 4-adjacent grid edge.
Tessellation update_voronoi(const std::vector<Vec2>& positions, const Domain& domain);

/// True iff q's grid cell is owned by robot_i.
bool cell_member(const Tessellation& tess, int robot_i, const Vec2& q);

const std::vector<int>& neighbors(const Tessellation& tess, int robot_i);

}  // namespace dias
