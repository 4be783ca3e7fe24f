#include "relax/symbol.hpp"

#include <cmath>

namespace relax {

Symmetrizer Symmetrizer::identity(int k, int m) {
  Symmetrizer r;
  r.r11 = [k](const Point&, const Point&) { return Matrix::Identity(k, k); };
  r.r22 = [m](const Point&, const Point&) { return Matrix::Identity(m, m); };
  return r;
}

int target_components(const ParabolicTarget& target) {
  return std::visit([](const auto& t) { return t.k; }, target);
}

int target_dimension(const ParabolicTarget& target) {
  return std::visit([](const auto& t) { return t.d; }, target);
}

FieldState FieldState::zeros(const RelaxationSystem& sys, const SpatialGrid& grid, double eps) {
  FieldState s;
  s.uI = Matrix::Zero(sys.k, grid.size());
  s.uII = Matrix::Zero(sys.m, grid.size());
  s.eps = eps;
  return s;
}

void FieldState::check_shape(const RelaxationSystem& sys, const SpatialGrid& grid) const {
  if (uI.rows() != sys.k || uI.cols() != grid.size() || uII.rows() != sys.m ||
      uII.cols() != grid.size()) {
    throw DimensionError("state shape does not match system (k, m) and grid");
  }
  if (!(eps > 0.0)) throw PreconditionError("state: eps must be positive");
}

namespace {

void check_xi(const RelaxationSystem& sys, const Point& xi) {
  if (xi.size() != sys.d) throw DimensionError("wave-vector dimension does not match system");
}

void check_blocks(const RelaxationSystem& sys, const TransportBlocks& b) {
  const bool ok = b.m12.rows() == sys.k && b.m12.cols() == sys.m && b.m21.rows() == sys.m &&
                  b.m21.cols() == sys.k && b.m22.rows() == sys.m && b.m22.cols() == sys.m &&
                  (b.m11.size() == 0 || (b.m11.rows() == sys.k && b.m11.cols() == sys.k));
  if (!ok) throw DimensionError("transport blocks do not match (k, m) of system " + sys.name);
}

}  // namespace

TransportBlocks contracted_blocks(const RelaxationSystem& sys, const Point& x, const Point& xi) {
  check_xi(sys, xi);
  if (sys.is_multiplier()) throw DimensionError("contracted_blocks: multiplier system has no real blocks");
  TransportBlocks out{Matrix::Zero(sys.k, sys.k), Matrix::Zero(sys.k, sys.m),
                      Matrix::Zero(sys.m, sys.k), Matrix::Zero(sys.m, sys.m)};
  for (int j = 0; j < sys.d; ++j) {
    const TransportBlocks b = sys.transport(x, j);
    check_blocks(sys, b);
    if (b.m11.size()) out.m11 += xi[j] * b.m11;
    out.m12 += xi[j] * b.m12;
    out.m21 += xi[j] * b.m21;
    out.m22 += xi[j] * b.m22;
  }
  return out;
}

CMatrix operator_symbol(const RelaxationSystem& sys, const Point& x, const Point& xi) {
  check_xi(sys, xi);
  const int k = sys.k, m = sys.m;
  CMatrix s = CMatrix::Zero(k + m, k + m);
  if (sys.is_multiplier()) {
    if (m != k) throw DimensionError("multiplier systems require m == k");
    const Matrix b = sys.multiplier(xi);
    if (b.rows() != k || b.cols() != k) throw DimensionError("multiplier symbol must be k x k");
    s.topRightCorner(k, m) = b.cast<Complex>();
    s.bottomLeftCorner(m, k) = -b.cast<Complex>();
    return s;
  }
  const TransportBlocks c = contracted_blocks(sys, x, xi);
  const Complex i(0.0, 1.0);
  s.topLeftCorner(k, k) = i * c.m11.cast<Complex>();
  s.topRightCorner(k, m) = i * c.m12.cast<Complex>();
  s.bottomLeftCorner(m, k) = i * c.m21.cast<Complex>();
  s.bottomRightCorner(m, m) = i * c.m22.cast<Complex>();
  return s;
}

CMatrix principal_symbol(const RelaxationSystem& sys, const Point& x, const Point& xi) {
  const CMatrix s = operator_symbol(sys, x, xi);
  return sys.is_multiplier() ? s : CMatrix(-s);
}

Matrix stiff_jacobian(const RelaxationSystem& sys, const Point& x, const Vector& u,
                      const Vector& z) {
  if (u.size() != sys.k || z.size() != sys.m) throw DimensionError("stiff_jacobian: state size");
  Matrix jac;
  if (sys.source_jacobian) {
    jac = sys.source_jacobian(x, u, z);
  } else {
    if (!sys.source) throw PreconditionError("system " + sys.name + " has no stiff source");
    jac.resize(sys.m, sys.m);
    const double step = 1e-6;
    for (int c = 0; c < sys.m; ++c) {
      Vector zp = z, zm = z;
      zp[c] += step;
      zm[c] -= step;
      jac.col(c) = (sys.source(x, u, zp) - sys.source(x, u, zm)) / (2.0 * step);
    }
  }
  if (jac.rows() != sys.m || jac.cols() != sys.m) throw DimensionError("stiff_jacobian: must be m x m");
  if (!jac.allFinite()) {
    throw SolverError("stiff_jacobian: non-finite entries at x=" + format_vector(x) +
                      " u=" + format_vector(u));
  }
  return jac;
}

Matrix limit_generator(const RelaxationSystem& sys, const Point& x, const Vector& u,
                       const Point& xi) {
  const int k = sys.k, m = sys.m;
  const Matrix qnu = stiff_jacobian(sys, x, u, Vector::Zero(m));
  Eigen::JacobiSVD<Matrix> svd(qnu);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 1e-14 * std::max(1.0, smax))) {
    throw SingularMatrixError("limit_generator: Q_nu singular at x=" + format_vector(x) +
                                  " u=" + format_vector(u) +
                                  " (smallest singular value " + format_double(smin) + ")",
                              smin);
  }
  const CMatrix s = operator_symbol(sys, x, xi);
  const CMatrix s12 = s.topRightCorner(k, m);
  const CMatrix s21 = s.bottomLeftCorner(m, k);
  const CMatrix inv = qnu.cast<Complex>().partialPivLu().solve(s21);
  const CMatrix g = -(s12 * inv);
  return g.real();
}

Matrix target_generator(const ParabolicTarget& target, const Point& x, const Vector& u,
                        const Point& xi) {
  return std::visit(
      [&](const auto& t) -> Matrix {
        if (xi.size() != t.d) throw DimensionError("target_generator: wave-vector dimension");
        Matrix big;
        if constexpr (std::is_same_v<std::decay_t<decltype(t)>, ReactionDiffusion>) {
          big = t.diffusion(x);
        } else {
          big = t.mobility(u);
        }
        if (big.rows() != t.k * t.d || big.cols() != t.k * t.d)
          throw DimensionError("target block matrix must be kd x kd");
        Matrix g = Matrix::Zero(t.k, t.k);
        for (int j = 0; j < t.d; ++j)
          for (int l = 0; l < t.d; ++l) g -= xi[j] * xi[l] * block_of(big, t.k, j, l);
        return g;
      },
      target);
}

}  // namespace relax
