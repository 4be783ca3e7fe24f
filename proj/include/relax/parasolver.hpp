#pragma once

#include "relax/system.hpp"

namespace relax {

struct ReferenceOptions {
  double dt = 1e-4;
  /// Time between stored snapshots; 0 stores the initial and final states only.
  double snapshot_stride = 0.0;
  double picard_tolerance = 1e-11;
  int picard_max_iterations = 50;
};

struct ReferenceTrajectory {
  std::vector<double> times;
  std::vector<Matrix> states;  // k x cells
};

/// Implicit-in-diffusion reference solver for the parabolic target.
///  - constant-coefficient reaction-diffusion: exact Fourier propagator for the
///    diffusion, reaction explicit (exact when f = 0);
///  - otherwise: second-order central differences, BDF2 in time with lagged
///    (Picard) coefficients, advection and sources extrapolated explicitly.
ReferenceTrajectory run_reference(const ParabolicTarget& target, const Matrix& u0,
                                  const SpatialGrid& grid, double T, const ReferenceOptions& opts);

/// xi^T A xi for a scalar target with d x d coefficient matrix A.
double mode_symbol(const Matrix& a, const Point& xi);

/// exp(-symbol * t).
double parabolic_mode_factor(double symbol, double t);

struct RelaxationRoots {
  Complex slow;  // the root tending to -symbol as eps -> 0
  Complex fast;
};

/// Roots of eps^2 lambda^2 + lambda + symbol = 0.
RelaxationRoots relaxation_roots(double symbol, double eps);

/// Exact amplitude at time t of eps^2 u'' + u' + symbol u = 0 with u(0) = u0,
/// u'(0) = du0; every single-mode relaxation of the heat type reduces to this.
double relaxation_mode_amplitude(double symbol, double eps, double t, double u0, double du0);

}  // namespace relax
