#include "relax/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace relax {

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_vector(const Vector& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out + "]";
}

namespace {
void check_axis(int n, double length) {
  if (n < 4) throw PreconditionError("grid: cell count must be >= 4, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length))
    throw PreconditionError("grid: period must be positive and finite");
}
}  // namespace

SpatialGrid::SpatialGrid(int n, double length) : dim_(1) {
  check_axis(n, length);
  n_ = {n, 1};
  length_ = {length, 1.0};
}

SpatialGrid::SpatialGrid(int nx, int ny, double lx, double ly) : dim_(2) {
  check_axis(nx, lx);
  check_axis(ny, ly);
  n_ = {nx, ny};
  length_ = {lx, ly};
}

double SpatialGrid::min_spacing() const {
  double h = spacing(0);
  if (dim_ == 2) h = std::min(h, spacing(1));
  return h;
}

double SpatialGrid::cell_volume() const {
  double v = spacing(0);
  if (dim_ == 2) v *= spacing(1);
  return v;
}

int SpatialGrid::index(int i, int j) const { return i + n_[0] * j; }

int SpatialGrid::neighbour(int cell, int axis, int offset) const {
  int i = cell % n_[0];
  int j = cell / n_[0];
  if (axis == 0) {
    i = ((i + offset) % n_[0] + n_[0]) % n_[0];
  } else {
    j = ((j + offset) % n_[1] + n_[1]) % n_[1];
  }
  return index(i, j);
}

Point SpatialGrid::point(int cell) const {
  Point x(dim_);
  x[0] = (cell % n_[0]) * spacing(0);
  if (dim_ == 2) x[1] = (cell / n_[0]) * spacing(1);
  return x;
}

std::vector<Point> SpatialGrid::points() const {
  std::vector<Point> out;
  out.reserve(size());
  for (int c = 0; c < size(); ++c) out.push_back(point(c));
  return out;
}

}  // namespace relax
