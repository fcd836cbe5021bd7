#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace dias {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Rectangular workspace [0,width] x [0,height] with a fixed evaluation grid.
struct Domain {
  double width = 10.0;
  double height = 10.0;
  int grid_nx = 50;
  int grid_ny = 50;

  void validate() const {
    if (width <= 0.0 || height <= 0.0)
      throw std::invalid_argument("Domain: width and height must be positive");
    if (grid_nx < 2 || grid_ny < 2)
      throw std::invalid_argument("Domain: grid_nx and grid_ny must be >= 2");
  }

  bool contains(const Vec2& q) const {
    return q.x >= 0.0 && q.x <= width && q.y >= 0.0 && q.y <= height;
  }

  double cell_dx() const { return width / grid_nx; }
  double cell_dy() const { return height / grid_ny; }
  double cell_area() const { return cell_dx() * cell_dy(); }
  int n_cells() const { return grid_nx * grid_ny; }

  // Row-major indexing: idx = iy * grid_nx + ix.
  int cell_index(int ix, int iy) const { return iy * grid_nx + ix; }

  Vec2 cell_center(int idx) const {
    const int iy = idx / grid_nx;
    const int ix = idx % grid_nx;
    return {(ix + 0.5) * cell_dx(), (iy + 0.5) * cell_dy()};
  }

  /// Grid cell containing q, clamped to the grid at the outer boundary.
  int cell_at(const Vec2& q) const {
    int ix = static_cast<int>(q.x / cell_dx());
    int iy = static_cast<int>(q.y / cell_dy());
    if (ix >= grid_nx) ix = grid_nx - 1;
    if (iy >= grid_ny) iy = grid_ny - 1;
    if (ix < 0) ix = 0;
    if (iy < 0) iy = 0;
    return cell_index(ix, iy);
  }

  Vec2 clamp(const Vec2& q) const {
    return {std::min(std::max(q.x, 0.0), width), std::min(std::max(q.y, 0.0), height)};
  }

  /// Clamp to the box shrunk by `margin` on every side. The domain walls are
  /// stationary sets of the cosine-basis descent (normal derivatives vanish
  /// there), so sensing commands clip to this instead of the exact boundary.
  Vec2 clamp_margin(const Vec2& q, double margin) const {
    return {std::min(std::max(q.x, margin), width - margin),
            std::min(std::max(q.y, margin), height - margin)};
  }

  void require_inside(const Vec2& q, const char* what) const {
    if (!contains(q))
      throw std::domain_error(std::string(what) + ": point (" + std::to_string(q.x) + ", " +
                              std::to_string(q.y) + ") outside domain");
  }
};

}  // namespace dias
