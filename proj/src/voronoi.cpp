#include "dias/voronoi.hpp"

#include <algorithm>
#include <stdexcept>

namespace dias {

Tessellation update_voronoi(const std::vector<Vec2>& positions, const Domain& domain) {
  if (positions.empty()) throw std::invalid_argument("update_voronoi: need at least one robot");
  domain.validate();

  Tessellation tess;
  tess.domain = domain;
  tess.generators = positions;
  const int n = static_cast<int>(positions.size());
  for (int i = 0; i < n; ++i)
    domain.require_inside(positions[static_cast<std::size_t>(i)], "update_voronoi");

  // Nudge exact duplicates apart so every generator owns its own cell.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (tess.generators[i] == tess.generators[j]) {
        tess.generators[i].x = std::min(tess.generators[i].x + 1e-9 * (j + 1), domain.width);
        tess.generators[i].y = std::min(tess.generators[i].y + 1e-9, domain.height);
      }

  const int nc = domain.n_cells();
  tess.cell_of_grid.assign(static_cast<std::size_t>(nc), 0);
  for (int idx = 0; idx < nc; ++idx) {
    const Vec2 c = domain.cell_center(idx);
    int best = 0;
    double best_d2 = (c - tess.generators[0]).squared_norm();
    for (int i = 1; i < n; ++i) {
      const double d2 = (c - tess.generators[i]).squared_norm();
      if (d2 < best_d2) {  // strict: ties stay with the lower index
        best_d2 = d2;
        best = i;
      }
    }
    tess.cell_of_grid[static_cast<std::size_t>(idx)] = best;
  }

  tess.adjacency.assign(static_cast<std::size_t>(n), {});
  auto link = [&](int a, int b) {
    auto& la = tess.adjacency[static_cast<std::size_t>(a)];
    if (std::find(la.begin(), la.end(), b) == la.end()) la.push_back(b);
  };
  for (int iy = 0; iy < domain.grid_ny; ++iy)
    for (int ix = 0; ix < domain.grid_nx; ++ix) {
      const int here = tess.cell_of_grid[static_cast<std::size_t>(domain.cell_index(ix, iy))];
      if (ix + 1 < domain.grid_nx) {
        const int right = tess.cell_of_grid[static_cast<std::size_t>(domain.cell_index(ix + 1, iy))];
        if (right != here) {
          link(here, right);
          link(right, here);
        }
      }
      if (iy + 1 < domain.grid_ny) {
        const int up = tess.cell_of_grid[static_cast<std::size_t>(domain.cell_index(ix, iy + 1))];
        if (up != here) {
          link(here, up);
          link(up, here);
        }
      }
    }
  for (auto& list : tess.adjacency) std::sort(list.begin(), list.end());
  return tess;
}

bool cell_member(const Tessellation& tess, int robot_i, const Vec2& q) {
  tess.domain.require_inside(q, "cell_member");
  return tess.owner(tess.domain.cell_at(q)) == robot_i;
}

const std::vector<int>& neighbors(const Tessellation& tess, int robot_i) {
  return tess.adjacency.at(static_cast<std::size_t>(robot_i));
}

}  // namespace dias
