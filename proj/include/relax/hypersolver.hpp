#pragma once

#include "relax/fourier.hpp"
#include "relax/system.hpp"

#include <map>
#include <memory>

namespace relax {

enum class FluxScheme { rusanov, upwind, spectral };
enum class SourceSolve { automatic, linear, newton };

std::string to_string(FluxScheme f);
FluxScheme parse_flux(const std::string& s);
std::string to_string(SourceSolve s);
SourceSolve parse_source_solve(const std::string& s);

struct SolverOptions {
  double cfl = 0.45;
  FluxScheme flux = FluxScheme::rusanov;
  /// `automatic` picks the closed form when the system declares a linear source.
  SourceSolve source_solve = SourceSolve::automatic;
  double newton_tolerance = 1e-12;
  int newton_max_iterations = 25;
  /// Time between stored snapshots; 0 stores the initial and final states only.
  double snapshot_stride = 0.0;

  void validate() const;
};

struct StepRecord {
  double t = 0.0;
  double dt = 0.0;
  double energy = 0.0;
  double max_speed = 0.0;     // s / eps
  double norm_uI = 0.0;       // discrete L2
  double norm_eps_uII = 0.0;  // discrete L2 of eps * uII
  double norm_uII_sq = 0.0;   // squared discrete L2 of uII
};

struct Trajectory {
  std::vector<FieldState> snapshots;
  /// First record is the initial state (dt = 0), then one per step.
  std::vector<StepRecord> steps;
  int clamp_events = 0;

  const FieldState& final_state() const { return snapshots.back(); }
};

/// Largest spectral radius of i * principal_symbol over grid points and unit
/// directions; the characteristic speeds of the scaled system are this over eps.
double max_wave_speed(const RelaxationSystem& sys, const SpatialGrid& grid);

/// cfl * eps * h_min / s, with the cfl halved in 2D for grid fluxes.
double stable_time_step(const RelaxationSystem& sys, const SpatialGrid& grid, double eps,
                        const SolverOptions& opts, double speed);

/// Lie-split IMEX step: explicit transport, explicit conserved sources, then a
/// pointwise implicit solve of the stiff source. Caches per-face and per-mode data.
class HyperbolicStepper {
 public:
  HyperbolicStepper(const RelaxationSystem& sys, const SpatialGrid& grid, SolverOptions opts);

  FieldState step(const FieldState& state, double dt);

  double wave_speed() const { return speed_; }
  double time_step_limit(double eps) const;
  int clamp_events() const { return clamp_events_; }
  const SolverOptions& options() const { return opts_; }

 private:
  void transport_grid(Matrix& w, double eps, double dt) const;
  void transport_spectral(Matrix& w, double eps, double dt);
  void source_update(FieldState& out, const FieldState& mid, double dt);

  RelaxationSystem sys_;
  SpatialGrid grid_;
  SolverOptions opts_;
  FourierGrid fourier_;
  double speed_ = 0.0;
  std::vector<Point> points_;
  // Unscaled transport matrix per axis (constant) or per axis and face (variable),
  // plus its absolute value for the upwind flux.
  std::vector<std::vector<Matrix>> face_m_;
  std::vector<std::vector<Matrix>> face_abs_;
  std::map<std::pair<double, double>, std::vector<CMatrix>> propagators_;
  int clamp_events_ = 0;
};

FieldState step(const RelaxationSystem& sys, const SpatialGrid& grid, const FieldState& state,
                double dt, const SolverOptions& opts);

/// Integrates to T with steps adapted so that every snapshot time is hit exactly.
Trajectory run(const RelaxationSystem& sys, const SpatialGrid& grid, const FieldState& init,
               double T, const SolverOptions& opts);

/// M21(x, D) u for differential systems, -B(D) u for multipliers (spectral derivatives).
Matrix apply_m21(const RelaxationSystem& sys, const FourierGrid& fourier, const Matrix& uI);

/// uII = Q_nu(x, u, 0)^{-1} (M21(x, D) u - DII(x, u, 0)) cellwise.
FieldState well_prepared(const RelaxationSystem& sys, const SpatialGrid& grid, const Matrix& uI,
                         double eps);

/// mean + amplitude * prod_j sin(2 pi x_j / L_j) in every conserved component.
Matrix sine_field(const SpatialGrid& grid, int k, double mean, double amplitude);

/// Discrete L2 norm sqrt(sum |w_c|^2 * cell volume) over all rows.
double grid_norm(const Matrix& fields, const SpatialGrid& grid);

}  // namespace relax
