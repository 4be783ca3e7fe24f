#pragma once

#include "relax/types.hpp"

#include <array>

namespace relax {

/// Periodic tensor grid on [0, L_0) x [0, L_1). Node i sits at x = i*h.
/// Cells are ordered with the first axis fastest.
class SpatialGrid {
 public:
  SpatialGrid(int n, double length);
  SpatialGrid(int nx, int ny, double lx, double ly);

  int dim() const { return dim_; }
  int cells(int axis) const { return n_[axis]; }
  double period(int axis) const { return length_[axis]; }
  double spacing(int axis) const { return length_[axis] / n_[axis]; }
  double min_spacing() const;
  int size() const { return n_[0] * (dim_ == 2 ? n_[1] : 1); }
  /// Product of spacings (cell volume).
  double cell_volume() const;

  int index(int i, int j = 0) const;
  /// Index of the neighbour `offset` cells away along `axis`, with wrap-around.
  int neighbour(int cell, int axis, int offset) const;
  Point point(int cell) const;
  std::vector<Point> points() const;

 private:
  int dim_;
  std::array<int, 2> n_{1, 1};
  std::array<double, 2> length_{1.0, 1.0};
};

}  // namespace relax
