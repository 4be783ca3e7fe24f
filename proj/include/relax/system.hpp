#pragma once

#include "relax/grid.hpp"

#include <functional>
#include <optional>
#include <variant>

namespace relax {

/// Transport coefficients of one spatial direction, in decoupled block form.
/// `m11` is empty for systems satisfying the conserved-block structure.
struct TransportBlocks {
  Matrix m11;  // k x k (may be empty)
  Matrix m12;  // k x m
  Matrix m21;  // m x k
  Matrix m22;  // m x m
};

using TransportField = std::function<TransportBlocks(const Point& x, int axis)>;
using MultiplierField = std::function<Matrix(const Point& xi)>;
using StateFunction = std::function<Vector(const Point& x, const Vector& u, const Vector& z)>;
using StateJacobian = std::function<Matrix(const Point& x, const Vector& u, const Vector& z)>;
using ScaledLowerOrder =
    std::function<Vector(const Point& x, const Vector& u, const Vector& v, double eps)>;
using ConservedSource = std::function<Vector(const Point& x, const Vector& u)>;

/// Decoupled semilinear relaxation system, written in the diffusive scaling
///
///   u_t + (1/eps) M11(x,D) u + M12(x,D) v = D~I(x,u,v,eps) + g(x,u)
///   eps^2 v_t + M21(x,D) u + eps M22(x,D) v = (1/eps) Q(x,u,eps v) + DII(x,u,eps v)
///
/// where M(x,D) = sum_j M_j(x) d/dx_j for differential systems, or a Fourier
/// multiplier [[0, B(D)], [-B(D), 0]] when `multiplier` is set.
///
/// `source`, `source_jacobian` and `lower_nonconserved` take the unscaled
/// non-conserved variable z = eps*v. Empty optional callables mean zero.
struct RelaxationSystem {
  std::string name;
  int k = 0;
  int m = 0;
  int d = 1;

  TransportField transport;
  MultiplierField multiplier;  // k x k symbol B(xi); requires m == k
  bool constant_coefficients = true;

  StateFunction source;          // Q(x, u, z), with Q(x, u, 0) = 0
  StateJacobian source_jacobian;  // Q_nu(x, u, z)
  /// Q(x,u,z) = Q_nu(x,u,0) z exactly (allows the closed-form implicit solve).
  bool source_linear = false;
  /// Q_nu does not depend on (u, z) (allows caching the implicit solve per cell).
  bool source_jacobian_constant = false;

  ScaledLowerOrder scaled_lower_conserved;  // D~I = (1/eps) DI(u, eps v)
  StateFunction lower_nonconserved;         // DII(x, u, z)
  ConservedSource conserved_source;         // f or G of the target

  /// Lower clamp on the first conserved component (kinetic densities).
  std::optional<double> positivity_floor;

  int size() const { return k + m; }
  bool is_multiplier() const { return static_cast<bool>(multiplier); }
};

/// Block-diagonal symmetrizer R = diag(R11, R22), blocks homogeneous of degree 0.
struct Symmetrizer {
  std::function<Matrix(const Point& x, const Point& xi)> r11;
  std::function<Matrix(const Point& x, const Point& xi)> r22;
  double floor = 1e-8;

  static Symmetrizer identity(int k, int m);
};

/// u_t = sum_{j,l} A_{jl}(x) d_j d_l u + f(u).
struct ReactionDiffusion {
  int k = 1;
  int d = 1;
  /// The kd x kd block matrix whose (j,l) block is A_{jl}(x).
  std::function<Matrix(const Point& x)> diffusion;
  bool constant_coefficients = true;
  std::function<Vector(const Vector& u)> reaction;  // empty = 0
};

/// u_t + sum_i d_i (F_i(u) - sum_j B_ij(u) d_j u) = G(u).
struct QuasilinearDivergence {
  int k = 1;
  int d = 1;
  std::function<Vector(const Vector& u)> flux;      // stacked F_i, size kd; empty = 0
  std::function<Matrix(const Vector& u)> mobility;  // kd x kd block matrix of B_ij
  std::function<Vector(const Vector& u)> source;    // G; empty = 0
  StateBox box;
};

using ParabolicTarget = std::variant<ReactionDiffusion, QuasilinearDivergence>;

int target_components(const ParabolicTarget& target);
int target_dimension(const ParabolicTarget& target);

/// Discrete (u, v) on a grid. Column c of `uI`/`uII` holds the components at cell c.
struct FieldState {
  Matrix uI;
  Matrix uII;
  double t = 0.0;
  double eps = 1.0;

  static FieldState zeros(const RelaxationSystem& sys, const SpatialGrid& grid, double eps);
  bool finite() const { return uI.allFinite() && uII.allFinite(); }
  void check_shape(const RelaxationSystem& sys, const SpatialGrid& grid) const;
};

}  // namespace relax
