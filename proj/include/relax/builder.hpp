#pragma once

#include "relax/system.hpp"

#include <span>

namespace relax {

/// W_t + (1/eps) sum_j A_j(x) d_j W = (1/eps^2) B(x, W) + (1/eps) D(x, W), before decoupling.
struct RawSystem {
  std::string name;
  int n = 0;
  int d = 1;
  std::function<Matrix(const Point& x, int axis)> coefficients;
  std::function<Vector(const Point& x, const Vector& w)> source;
  std::function<Matrix(const Point& x, const Vector& w)> source_jacobian;  // optional
  std::function<Vector(const Point& x, const Vector& w)> lower_order;      // optional
  int source_rank = -1;  // declared dim of the range of B; -1 if undeclared
  bool constant_coefficients = true;
  StateBox probe_box;    // states W used to verify P^I B = 0
};

/// Invertible P whose first k rows annihilate the stiff source.
struct DecouplingTransform {
  Matrix p;
  int k = 0;

  Matrix conserved_rows() const { return p.topRows(k); }
  Matrix nonconserved_rows() const { return p.bottomRows(p.rows() - k); }
};

RelaxationSystem decouple(const RawSystem& raw, const DecouplingTransform& transform,
                          std::span<const Point> probe_points = {});

/// Inverse of the block split: A_j = P^{-1} [[M11, M12], [M21, M22]]_j P at x.
std::vector<Matrix> recouple(const RelaxationSystem& sys, const DecouplingTransform& transform,
                             const Point& x);

/// Requires the kd x kd block matrix A(x) to be symmetric positive definite at the
/// probe points (origin only, for constant coefficients).
RelaxationSystem from_reaction_diffusion(const ReactionDiffusion& target,
                                         std::span<const Point> probe_points = {});

RelaxationSystem from_quasilinear(const QuasilinearDivergence& target);

/// Constant-coefficient square-root-symbol system, B(xi) = S(xi)^{1/2} with
/// S(xi) = sum A_{jl} xi_j xi_l, checked on every Fourier mode of `grid`.
RelaxationSystem from_sqrt_symbol(const ReactionDiffusion& target, const SpatialGrid& grid);

struct CarlemanModel {
  RawSystem raw;
  DecouplingTransform transform;
  RelaxationSystem system;
};

/// Two-velocity kinetic model and its (rho, m) decoupling.
CarlemanModel carleman();

// Canonical targets used by demos and acceptance tests.
ReactionDiffusion heat_target(int d);
ReactionDiffusion anisotropic_target();
/// k = 2, d = 1, A = [[1, 2], [0, 1]]: parabolic in the Petrowski sense only.
ReactionDiffusion triangular_target();
QuasilinearDivergence bu2_target();
/// rho_t = (1/2)(log rho)_xx written as d_x(B(rho) d_x rho), B = 1/(2 rho).
QuasilinearDivergence carleman_limit_target();
std::function<Vector(const Vector&)> logistic_reaction();

/// Named fixture: system, the limit it approximates, and its default data.
struct Demo {
  std::string name;
  RelaxationSystem system;
  std::optional<ParabolicTarget> target;  // empty: limit is the zero solution
  StateBox box;
  double mean = 0.0;
  double amplitude = 1.0;
};

/// carleman, heat1d, heat2d, aniso2d, quasilinear-bu2, sqrt-heat, null-limit.
/// `sqrt-heat` needs the grid for multiplier tabulation.
Demo make_demo(const std::string& name, const SpatialGrid& grid, bool logistic = false);
const std::vector<std::string>& demo_names();

}  // namespace relax
