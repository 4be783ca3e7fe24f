#include "relax/diagnostics.hpp"

#include "relax/symbol.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace relax {

double energy(const FieldState& state, const SpatialGrid& grid) {
  return (state.uI.squaredNorm() + state.eps * state.eps * state.uII.squaredNorm()) *
         grid.cell_volume();
}

EnergyCheck energy_inequality_check(const Trajectory& traj, double lambda0, bool source_free) {
  EnergyCheck out;
  if (traj.steps.empty()) return out;
  const double e0 = traj.steps.front().energy;
  const double t0 = traj.steps.front().t;
  double c = 0.0;
  for (std::size_t i = 1; i < traj.steps.size(); ++i) {
    const StepRecord& r = traj.steps[i];
    const double prev = traj.steps[i - 1].energy;
    const double ratio = prev > 0.0 ? r.energy / prev : (r.energy > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    out.worst_step_ratio = std::max(out.worst_step_ratio, ratio);
    if (r.energy > prev * (1.0 + 1e-10)) out.per_step_nonincreasing = false;
    const double tau = r.t - t0;
    if (r.energy > e0 * (1.0 + 1e-9) && tau > 0.0) {
      c = std::max(c, std::log(r.energy / (e0 * (1.0 + 1e-9))) / tau);
    }
    out.dissipation += r.dt * r.norm_uII_sq;
  }
  out.growth_rate = c;
  out.dissipation *= lambda0 / 4.0;
  const double T = traj.steps.back().t - t0;
  out.dissipation_bound = e0 * (std::exp(c * T) + 2.0);
  out.passed = out.dissipation <= out.dissipation_bound;
  if (source_free) out.passed = out.passed && c == 0.0 && out.per_step_nonincreasing;
  return out;
}

double limit_residual(const FieldState& state, const RelaxationSystem& sys, const SpatialGrid& grid) {
  state.check_shape(sys, grid);
  const FourierGrid fourier(grid);
  Matrix r = apply_m21(sys, fourier, state.uI);
  const Vector zero = Vector::Zero(sys.m);
  for (int c = 0; c < grid.size(); ++c) {
    const Point x = grid.point(c);
    const Vector u = state.uI.col(c);
    r.col(c) -= stiff_jacobian(sys, x, u, zero) * state.uII.col(c);
    if (sys.lower_nonconserved) r.col(c) -= sys.lower_nonconserved(x, u, zero);
  }
  double acc = 0.0;
  for (int row = 0; row < sys.m; ++row) acc += fourier.hminus1_norm_squared(r.row(row).transpose());
  return std::sqrt(acc);
}

bool ConvergenceTable::errI_strictly_decreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].errI < rows[i - 1].errI)) return false;
  return !rows.empty();
}

double observed_order(double e0, double e1, double eps0, double eps1) {
  return std::log(e0 / e1) / std::log(eps0 / eps1);
}

double spacetime_error(const std::vector<double>& times, const std::vector<Matrix>& a,
                       const std::vector<Matrix>& b, const SpatialGrid& grid) {
  if (a.size() != times.size() || b.size() != times.size())
    throw DimensionError("spacetime_error: snapshot counts differ");
  if (times.size() < 2) throw PreconditionError("spacetime_error: need at least two snapshot times");
  double acc = 0.0;
  auto sq = [&](std::size_t i) { return (a[i] - b[i]).squaredNorm() * grid.cell_volume(); };
  for (std::size_t i = 1; i < times.size(); ++i)
    acc += 0.5 * (times[i] - times[i - 1]) * (sq(i) + sq(i - 1));
  return std::sqrt(acc);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ConvergenceTable convergence_study(const LadderSetup& setup, const SpatialGrid& grid) {
  const auto& eps = setup.epsilons;
  if (eps.size() < 3) throw PreconditionError("convergence study: need at least three eps values");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw PreconditionError("convergence study: eps values must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1]))
      throw PreconditionError("convergence study: eps ladder must be strictly decreasing");
  }
  const RelaxationSystem& sys = setup.system;
  if (setup.initial_uI.rows() != sys.k || setup.initial_uI.cols() != grid.size())
    throw DimensionError("convergence study: initial field shape");
  if (setup.reference_refinement < 1) throw PreconditionError("convergence study: refinement must be >= 1");

  SolverOptions opts = setup.solver;
  if (!(opts.snapshot_stride > 0.0)) opts.snapshot_stride = setup.T / 20.0;

  std::vector<Trajectory> trajectories(eps.size());
  parallel_for(static_cast<int>(eps.size()), setup.threads, [&](int i) {
    FieldState init = setup.well_prepared ? well_prepared(sys, grid, setup.initial_uI, eps[i])
                                          : FieldState::zeros(sys, grid, eps[i]);
    init.uI = setup.initial_uI;
    trajectories[i] = run(sys, grid, init, setup.T, opts);
  });

  std::vector<double> times;
  for (const auto& s : trajectories.front().snapshots) times.push_back(s.t);

  std::vector<Matrix> reference;
  if (setup.reference) {
    ReferenceOptions ropts;
    HyperbolicStepper probe(sys, grid, opts);
    ropts.dt = probe.time_step_limit(eps.front()) / setup.reference_refinement;
    ropts.snapshot_stride = opts.snapshot_stride;
    reference = run_reference(*setup.reference, setup.initial_uI, grid, setup.T, ropts).states;
  } else {
    reference.assign(times.size(), Matrix::Zero(sys.k, grid.size()));
  }
  if (reference.size() != times.size())
    throw DimensionError("convergence study: reference and hyperbolic snapshot times differ");

  ConvergenceTable table;
  table.initial_uI_norm = grid_norm(setup.initial_uI, grid);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const Trajectory& traj = trajectories[i];
    std::vector<Matrix> states;
    for (const auto& s : traj.snapshots) states.push_back(s.uI);
    ConvergenceRow row;
    row.eps = eps[i];
    row.errI = spacetime_error(times, states, reference, grid);
    row.errII_weak = limit_residual(traj.final_state(), sys, grid);
    for (const auto& r : traj.steps) {
      row.sup_eps_uII = std::max(row.sup_eps_uII, r.norm_eps_uII);
      row.sup_uI = std::max(row.sup_uI, r.norm_uI);
    }
    row.final_uI_norm = grid_norm(traj.final_state().uI, grid);
    row.observed_order = i == 0 ? std::numeric_limits<double>::quiet_NaN()
                                : observed_order(table.rows[i - 1].errI, row.errI, eps[i - 1], eps[i]);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace relax
