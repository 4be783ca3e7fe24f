#pragma once

#include "relax/builder.hpp"
#include "relax/validator.hpp"

#include <numbers>

namespace relax::testing {

inline constexpr double kPi = std::numbers::pi;

inline Point pt(double a) { return Point::Constant(1, a); }
inline Point pt(double a, double b) {
  Point p(2);
  p << a, b;
  return p;
}
inline Vector vec(double a) { return Vector::Constant(1, a); }

/// 1D, k = m = 1 system with the given constant blocks and Q = -v.
inline RelaxationSystem scalar_system(double m11, double m12, double m21, double m22) {
  RelaxationSystem s;
  s.name = "scalar";
  s.k = 1;
  s.m = 1;
  s.d = 1;
  s.transport = [=](const Point&, int) {
    return TransportBlocks{m11 == 0.0 ? Matrix() : Matrix::Constant(1, 1, m11), Matrix::Constant(1, 1, m12),
                           Matrix::Constant(1, 1, m21), Matrix::Constant(1, 1, m22)};
  };
  s.source = [](const Point&, const Vector&, const Vector& z) { return Vector(-z); };
  s.source_jacobian = [](const Point&, const Vector&, const Vector&) { return Matrix(-Matrix::Identity(1, 1)); };
  s.source_linear = true;
  s.source_jacobian_constant = true;
  return s;
}

inline SampleSet samples_1d(double lo = -1.0, double hi = 1.0) {
  return SampleSet::make(SpatialGrid(64, 1.0), StateBox::uniform(1, lo, hi));
}

inline SampleSet samples_2d(double lo = -1.0, double hi = 1.0) {
  return SampleSet::make(SpatialGrid(16, 16, 1.0, 1.0), StateBox::uniform(1, lo, hi));
}

}  // namespace relax::testing
