#pragma once

#include "relax/hypersolver.hpp"
#include "relax/parasolver.hpp"

namespace relax {

/// sum (eps^2 |uII|^2 + |uI|^2) * cell volume.
double energy(const FieldState& state, const SpatialGrid& grid);

struct EnergyCheck {
  bool passed = false;
  double growth_rate = 0.0;  // smallest c >= 0 with E(t) <= E(0) e^{ct} (1 + 1e-9)
  bool per_step_nonincreasing = true;
  double worst_step_ratio = 0.0;  // max E(t_{n+1}) / E(t_n)
  double dissipation = 0.0;       // (lambda0 / 4) sum dt |uII|^2
  double dissipation_bound = 0.0;  // E(0) (e^{cT} + 2)
};

/// With `source_free`, additionally requires c = 0 and per-step non-increase
/// within a factor 1 + 1e-10.
EnergyCheck energy_inequality_check(const Trajectory& traj, double lambda0, bool source_free);

/// Discrete H^{-1} norm of M21(x, D) uI - Q_nu(x, uI, 0) uII - DII(x, uI, 0).
double limit_residual(const FieldState& state, const RelaxationSystem& sys, const SpatialGrid& grid);

struct ConvergenceRow {
  double eps = 0.0;
  double errI = 0.0;
  double errII_weak = 0.0;
  double sup_eps_uII = 0.0;
  double sup_uI = 0.0;
  double final_uI_norm = 0.0;
  double observed_order = 0.0;  // NaN on the first row
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double initial_uI_norm = 0.0;

  bool errI_strictly_decreasing() const;
};

struct LadderSetup {
  RelaxationSystem system;
  std::optional<ParabolicTarget> reference;  // empty: compare against the zero function
  Matrix initial_uI;
  bool well_prepared = true;
  double T = 0.1;
  std::vector<double> epsilons;
  SolverOptions solver;
  /// Reference dt is the hyperbolic step at the largest eps divided by this.
  int reference_refinement = 4;
  int threads = 1;
};

/// Runs the hyperbolic system for every eps (concurrently when threads > 1, rows
/// always in ladder order) and compares uI with the reference in L2(grid x [0, T]).
ConvergenceTable convergence_study(const LadderSetup& setup, const SpatialGrid& grid);

/// log(e0 / e1) / log(eps0 / eps1).
double observed_order(double e0, double e1, double eps0, double eps1);

/// Trapezoid-in-time discrete L2(space x time) distance between two snapshot series.
double spacetime_error(const std::vector<double>& times, const std::vector<Matrix>& a,
                       const std::vector<Matrix>& b, const SpatialGrid& grid);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace relax
