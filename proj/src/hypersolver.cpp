#include "relax/hypersolver.hpp"

#include "relax/symbol.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

namespace relax {

std::string to_string(FluxScheme f) {
  switch (f) {
    case FluxScheme::rusanov: return "rusanov";
    case FluxScheme::upwind: return "upwind";
    case FluxScheme::spectral: return "spectral";
  }
  return "?";
}

FluxScheme parse_flux(const std::string& s) {
  if (s == "rusanov") return FluxScheme::rusanov;
  if (s == "upwind") return FluxScheme::upwind;
  if (s == "spectral") return FluxScheme::spectral;
  throw PreconditionError("unknown flux scheme '" + s + "' (expected rusanov, upwind or spectral)");
}

std::string to_string(SourceSolve s) {
  switch (s) {
    case SourceSolve::automatic: return "auto";
    case SourceSolve::linear: return "linear";
    case SourceSolve::newton: return "newton";
  }
  return "?";
}

SourceSolve parse_source_solve(const std::string& s) {
  if (s == "auto") return SourceSolve::automatic;
  if (s == "linear") return SourceSolve::linear;
  if (s == "newton") return SourceSolve::newton;
  throw PreconditionError("unknown source solve '" + s + "' (expected auto, linear or newton)");
}

void SolverOptions::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw PreconditionError("solver: cfl must lie in (0, 1]");
  if (!(newton_tolerance > 0.0)) throw PreconditionError("solver: newton tolerance must be positive");
  if (newton_max_iterations < 1) throw PreconditionError("solver: newton iterations must be >= 1");
  if (!(snapshot_stride >= 0.0)) throw PreconditionError("solver: snapshot stride must be >= 0");
}

namespace {

std::vector<Point> unit_directions(int d) {
  std::vector<Point> out;
  if (d == 1) return {Point::Constant(1, 1.0), Point::Constant(1, -1.0)};
  for (int i = 0; i < 64; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / 64;
    Point xi(2);
    xi << std::cos(theta), std::sin(theta);
    out.push_back(xi);
  }
  return out;
}

Matrix assemble(const RelaxationSystem& sys, const TransportBlocks& b) {
  const int k = sys.k, m = sys.m;
  Matrix a = Matrix::Zero(k + m, k + m);
  if (b.m11.size()) a.topLeftCorner(k, k) = b.m11;
  a.topRightCorner(k, m) = b.m12;
  a.bottomLeftCorner(m, k) = b.m21;
  a.bottomRightCorner(m, m) = b.m22;
  return a;
}

Matrix absolute_value(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw SolverError("upwind: eigen-decomposition failed");
  const CMatrix v = es.eigenvectors();
  const CVector lambda = es.eigenvalues();
  if (lambda.imag().cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, lambda.cwiseAbs().maxCoeff()))
    throw SolverError("upwind: transport matrix has complex eigenvalues");
  Eigen::FullPivLU<CMatrix> lu(v);
  if (!lu.isInvertible()) throw SolverError("upwind: transport matrix is not diagonalizable");
  const CMatrix abs = v * lambda.real().cwiseAbs().cast<Complex>().asDiagonal() * lu.inverse();
  return abs.real();
}

}  // namespace

double max_wave_speed(const RelaxationSystem& sys, const SpatialGrid& grid) {
  const Complex i(0.0, 1.0);
  std::vector<Point> points;
  if (sys.constant_coefficients || sys.is_multiplier()) {
    points.push_back(Point::Zero(grid.dim()));
  } else {
    points = grid.points();
  }
  double s = 0.0;
  for (const auto& x : points) {
    for (const auto& xi : unit_directions(sys.d)) {
      const CMatrix a = i * principal_symbol(sys, x, xi);
      Eigen::ComplexEigenSolver<CMatrix> es(a, false);
      s = std::max(s, es.eigenvalues().cwiseAbs().maxCoeff());
    }
  }
  return s;
}

double stable_time_step(const RelaxationSystem& sys, const SpatialGrid& grid, double eps,
                        const SolverOptions& opts, double speed) {
  const bool spectral = opts.flux == FluxScheme::spectral || sys.is_multiplier();
  const double cfl = spectral || grid.dim() == 1 ? opts.cfl : opts.cfl / 2.0;
  const double s = speed > 0.0 ? speed : 1.0;
  return cfl * eps * grid.min_spacing() / s;
}

HyperbolicStepper::HyperbolicStepper(const RelaxationSystem& sys, const SpatialGrid& grid,
                                     SolverOptions opts)
    : sys_(sys), grid_(grid), opts_(opts), fourier_(grid) {
  opts_.validate();
  if (sys_.d != grid_.dim()) throw DimensionError("solver: system and grid dimensions differ");
  if (sys_.is_multiplier()) opts_.flux = FluxScheme::spectral;
  if (opts_.flux == FluxScheme::spectral && !sys_.constant_coefficients)
    throw PreconditionError("solver: spectral transport requires constant coefficients");
  speed_ = max_wave_speed(sys_, grid_);
  points_ = grid_.points();

  if (opts_.flux == FluxScheme::spectral) return;
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    std::vector<Matrix> mats, abs;
    if (sys_.constant_coefficients) {
      mats.push_back(assemble(sys_, sys_.transport(Point::Zero(grid_.dim()), axis)));
    } else {
      const double half = grid_.spacing(axis) / 2.0;
      for (int c = 0; c < grid_.size(); ++c) {
        Point xf = points_[c];
        xf[axis] += half;
        mats.push_back(assemble(sys_, sys_.transport(xf, axis)));
      }
    }
    if (opts_.flux == FluxScheme::upwind)
      for (const auto& a : mats) abs.push_back(absolute_value(a));
    face_m_.push_back(std::move(mats));
    face_abs_.push_back(std::move(abs));
  }
}

double HyperbolicStepper::time_step_limit(double eps) const {
  return stable_time_step(sys_, grid_, eps, opts_, speed_);
}

// Semi-discrete form per axis, in fluctuation form with face matrices A_f:
//   W_c -= dt/(2h) [A_{c+1/2} dW_{c+1/2} + A_{c-1/2} dW_{c-1/2}]
//        - dt/(2h) [D_{c+1/2} dW_{c+1/2} - D_{c-1/2} dW_{c-1/2}]
// where the scaled A_f = S^{-1} M_f S / eps with S = diag(I, eps I). For constant
// coefficients this telescopes, so the conserved rows stay in divergence form.
void HyperbolicStepper::transport_grid(Matrix& w, double eps, double dt) const {
  const int k = sys_.k;
  const int n = grid_.size();
  Matrix update = Matrix::Zero(w.rows(), n);
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    const double r = dt / (2.0 * grid_.spacing(axis));
    Matrix diff(w.rows(), n);
    for (int c = 0; c < n; ++c) diff.col(c) = w.col(grid_.neighbour(c, axis, 1)) - w.col(c);

    Matrix hat = diff;
    hat.bottomRows(sys_.m) *= eps;
    Matrix central(w.rows(), n);
    Matrix dissip(w.rows(), n);
    const bool constant = face_m_[axis].size() == 1;
    if (constant) central = face_m_[axis][0] * hat;
    for (int c = 0; c < n; ++c)
      if (!constant) central.col(c) = face_m_[axis][c] * hat.col(c);
    central.topRows(k) /= eps;
    central.bottomRows(sys_.m) /= eps * eps;

    if (opts_.flux == FluxScheme::upwind) {
      if (constant) dissip = face_abs_[axis][0] * hat;
      for (int c = 0; c < n; ++c)
        if (!constant) dissip.col(c) = face_abs_[axis][c] * hat.col(c);
      dissip.topRows(k) /= eps;
      dissip.bottomRows(sys_.m) /= eps * eps;
    } else {
      dissip = (speed_ / eps) * diff;
    }

    for (int c = 0; c < n; ++c) {
      const int left = grid_.neighbour(c, axis, -1);
      update.col(c) += r * (central.col(c) + central.col(left)) - r * (dissip.col(c) - dissip.col(left));
    }
  }
  w -= update;
}

void HyperbolicStepper::transport_spectral(Matrix& w, double eps, double dt) {
  const int k = sys_.k, m = sys_.m, nn = k + m;
  const int n = grid_.size();
  auto key = std::make_pair(dt, eps);
  auto it = propagators_.find(key);
  if (it == propagators_.end()) {
    if (propagators_.size() > 8) propagators_.clear();
    const bool odd = !sys_.is_multiplier();
    std::vector<CMatrix> props(n);
    const Point x0 = Point::Zero(grid_.dim());
    for (int mode = 0; mode < n; ++mode) {
      const CMatrix s = operator_symbol(sys_, x0, fourier_.wavenumber(mode, odd));
      CMatrix t(nn, nn);
      t.topLeftCorner(k, k) = s.topLeftCorner(k, k) / eps;
      t.topRightCorner(k, m) = s.topRightCorner(k, m);
      t.bottomLeftCorner(m, k) = s.bottomLeftCorner(m, k) / (eps * eps);
      t.bottomRightCorner(m, m) = s.bottomRightCorner(m, m) / eps;
      props[mode] = CMatrix(-dt * t).exp();
    }
    it = propagators_.emplace(key, std::move(props)).first;
  }
  CMatrix coeffs(nn, n);
  for (int r = 0; r < nn; ++r) coeffs.row(r) = fourier_.forward(w.row(r).transpose()).transpose();
  for (int mode = 0; mode < n; ++mode) coeffs.col(mode) = it->second[mode] * coeffs.col(mode);
  for (int r = 0; r < nn; ++r) w.row(r) = fourier_.inverse(coeffs.row(r).transpose()).transpose();
}

void HyperbolicStepper::source_update(FieldState& out, const FieldState& mid, double dt) {
  const int m = sys_.m;
  const double eps = mid.eps;
  const double e2 = eps * eps;
  const int n = grid_.size();
  const bool linear = opts_.source_solve == SourceSolve::linear ||
                      (opts_.source_solve == SourceSolve::automatic && sys_.source_linear);
  Matrix cached_inverse;
  const bool reuse = linear && sys_.source_jacobian_constant && sys_.constant_coefficients;

  for (int c = 0; c < n; ++c) {
    const Point& x = points_[c];
    const Vector ustar = mid.uI.col(c);
    const Vector vstar = mid.uII.col(c);
    Vector u = ustar;
    if (sys_.scaled_lower_conserved) u += dt * sys_.scaled_lower_conserved(x, ustar, vstar, eps);
    if (sys_.conserved_source) u += dt * sys_.conserved_source(x, ustar);
    if (sys_.positivity_floor && u[0] < *sys_.positivity_floor) {
      u[0] = *sys_.positivity_floor;
      ++clamp_events_;
    }
    out.uI.col(c) = u;

    if (m == 0 || !sys_.source) {
      out.uII.col(c) = vstar;
      continue;
    }
    const Vector zstar = eps * vstar;
    Vector rhs = e2 * vstar;
    if (sys_.lower_nonconserved) rhs += dt * sys_.lower_nonconserved(x, u, zstar);

    if (linear) {
      if (reuse && cached_inverse.size()) {
        out.uII.col(c) = cached_inverse * rhs;
        continue;
      }
      const Matrix lhs = e2 * Matrix::Identity(m, m) - dt * stiff_jacobian(sys_, x, u, Vector::Zero(m));
      Eigen::PartialPivLU<Matrix> lu(lhs);
      if (reuse) {
        cached_inverse = lu.inverse();
        out.uII.col(c) = cached_inverse * rhs;
      } else {
        out.uII.col(c) = lu.solve(rhs);
      }
      continue;
    }

    Vector v = vstar;
    bool converged = false;
    double last = 0.0;
    for (int it = 0; it < opts_.newton_max_iterations; ++it) {
      const Vector z = eps * v;
      const Vector f = e2 * v - rhs - (dt / eps) * sys_.source(x, u, z);
      const Matrix jac = e2 * Matrix::Identity(m, m) - dt * stiff_jacobian(sys_, x, u, z);
      const Vector delta = jac.partialPivLu().solve(f);
      v -= delta;
      last = delta.norm();
      if (last <= opts_.newton_tolerance * (1.0 + v.norm())) {
        converged = true;
        break;
      }
    }
    if (!converged || !v.allFinite()) {
      throw SolverError("newton did not converge at cell " + std::to_string(c) + " x=" +
                        format_vector(x) + " t=" + format_double(mid.t) +
                        " (last update " + format_double(last) + ")");
    }
    out.uII.col(c) = v;
  }
}

FieldState HyperbolicStepper::step(const FieldState& state, double dt) {
  state.check_shape(sys_, grid_);
  if (!(dt > 0.0)) throw PreconditionError("step: dt must be positive");
  const double eps = state.eps;
  if (opts_.flux != FluxScheme::spectral) {
    const double limit = time_step_limit(eps);
    if (dt > limit * (1.0 + 1e-12)) {
      throw SolverError("CFL violation: dt=" + format_double(dt) + " exceeds " +
                        format_double(limit));
    }
  }

  const int k = sys_.k, m = sys_.m;
  Matrix w(k + m, grid_.size());
  w.topRows(k) = state.uI;
  w.bottomRows(m) = state.uII;
  if (opts_.flux == FluxScheme::spectral) {
    transport_spectral(w, eps, dt);
  } else {
    transport_grid(w, eps, dt);
  }

  FieldState mid;
  mid.uI = w.topRows(k);
  mid.uII = w.bottomRows(m);
  mid.t = state.t;
  mid.eps = eps;

  FieldState out = mid;
  source_update(out, mid, dt);
  out.t = state.t + dt;

  if (!out.finite()) {
    for (int c = 0; c < grid_.size(); ++c) {
      if (!out.uI.col(c).allFinite() || !out.uII.col(c).allFinite()) {
        throw SolverError("non-finite state at t=" + format_double(out.t) + " cell " +
                          std::to_string(c) + " x=" + format_vector(points_[c]));
      }
    }
  }
  return out;
}

FieldState step(const RelaxationSystem& sys, const SpatialGrid& grid, const FieldState& state,
                double dt, const SolverOptions& opts) {
  HyperbolicStepper stepper(sys, grid, opts);
  return stepper.step(state, dt);
}

double grid_norm(const Matrix& fields, const SpatialGrid& grid) {
  return std::sqrt(fields.squaredNorm() * grid.cell_volume());
}

namespace {

StepRecord record_of(const FieldState& s, const SpatialGrid& grid, double dt, double speed) {
  StepRecord r;
  r.t = s.t;
  r.dt = dt;
  const double vol = grid.cell_volume();
  r.norm_uII_sq = s.uII.squaredNorm() * vol;
  r.energy = s.uI.squaredNorm() * vol + s.eps * s.eps * r.norm_uII_sq;
  r.max_speed = speed / s.eps;
  r.norm_uI = grid_norm(s.uI, grid);
  r.norm_eps_uII = s.eps * std::sqrt(r.norm_uII_sq);
  return r;
}

}  // namespace

Trajectory run(const RelaxationSystem& sys, const SpatialGrid& grid, const FieldState& init,
               double T, const SolverOptions& opts) {
  init.check_shape(sys, grid);
  if (!(T >= 0.0) || !std::isfinite(T)) throw PreconditionError("run: T must be finite and >= 0");
  if (!init.finite()) throw PreconditionError("run: initial state has non-finite entries");
  if (sys.positivity_floor) {
    for (int c = 0; c < grid.size(); ++c) {
      if (!(init.uI(0, c) > 0.0)) {
        throw PreconditionError("run: initial density must be positive; cell " + std::to_string(c) +
                                " has " + format_double(init.uI(0, c)));
      }
    }
  }

  HyperbolicStepper stepper(sys, grid, opts);
  const double dt_max = stepper.time_step_limit(init.eps);

  std::vector<double> marks;
  if (opts.snapshot_stride > 0.0) {
    for (int i = 1;; ++i) {
      const double t = i * opts.snapshot_stride;
      if (t >= T * (1.0 - 1e-12)) break;
      marks.push_back(t);
    }
  }
  if (T > 0.0) marks.push_back(T);

  Trajectory traj;
  FieldState state = init;
  traj.snapshots.push_back(state);
  traj.steps.push_back(record_of(state, grid, 0.0, stepper.wave_speed()));
  double t0 = init.t;
  for (double mark : marks) {
    const double target = init.t + mark;
    const double span = target - t0;
    const int nsub = std::max(1, static_cast<int>(std::ceil(span / dt_max - 1e-9)));
    const double dt = span / nsub;
    for (int s = 0; s < nsub; ++s) {
      state = stepper.step(state, dt);
      if (s == nsub - 1) state.t = target;
      traj.steps.push_back(record_of(state, grid, dt, stepper.wave_speed()));
    }
    traj.snapshots.push_back(state);
    t0 = target;
  }
  traj.clamp_events = stepper.clamp_events();
  return traj;
}

Matrix apply_m21(const RelaxationSystem& sys, const FourierGrid& fourier, const Matrix& uI) {
  const int k = sys.k, m = sys.m;
  const int n = fourier.size();
  if (uI.rows() != k || uI.cols() != n) throw DimensionError("apply_m21: field shape");
  Matrix out = Matrix::Zero(m, n);
  if (sys.is_multiplier()) {
    CMatrix coeffs(k, n);
    for (int r = 0; r < k; ++r) coeffs.row(r) = fourier.forward(uI.row(r).transpose()).transpose();
    CMatrix res(m, n);
    for (int mode = 0; mode < n; ++mode)
      res.col(mode) = -(sys.multiplier(fourier.wavenumber(mode)).cast<Complex>() * coeffs.col(mode));
    for (int r = 0; r < m; ++r) out.row(r) = fourier.inverse(res.row(r).transpose()).transpose();
    return out;
  }
  const SpatialGrid& grid = fourier.grid();
  for (int axis = 0; axis < grid.dim(); ++axis) {
    Matrix du(k, n);
    for (int r = 0; r < k; ++r) du.row(r) = fourier.derivative(uI.row(r).transpose(), axis).transpose();
    if (sys.constant_coefficients) {
      out += sys.transport(Point::Zero(grid.dim()), axis).m21 * du;
    } else {
      for (int c = 0; c < n; ++c) out.col(c) += sys.transport(grid.point(c), axis).m21 * du.col(c);
    }
  }
  return out;
}

FieldState well_prepared(const RelaxationSystem& sys, const SpatialGrid& grid, const Matrix& uI,
                         double eps) {
  FieldState s = FieldState::zeros(sys, grid, eps);
  if (uI.rows() != sys.k || uI.cols() != grid.size()) throw DimensionError("well_prepared: field shape");
  s.uI = uI;
  const FourierGrid fourier(grid);
  const Matrix rhs = apply_m21(sys, fourier, uI);
  for (int c = 0; c < grid.size(); ++c) {
    const Point x = grid.point(c);
    const Vector u = uI.col(c);
    Vector b = rhs.col(c);
    if (sys.lower_nonconserved) b -= sys.lower_nonconserved(x, u, Vector::Zero(sys.m));
    const Matrix qnu = stiff_jacobian(sys, x, u, Vector::Zero(sys.m));
    s.uII.col(c) = qnu.partialPivLu().solve(b);
  }
  return s;
}

Matrix sine_field(const SpatialGrid& grid, int k, double mean, double amplitude) {
  Matrix out(k, grid.size());
  for (int c = 0; c < grid.size(); ++c) {
    const Point x = grid.point(c);
    double v = amplitude;
    for (int j = 0; j < grid.dim(); ++j) v *= std::sin(2.0 * std::numbers::pi * x[j] / grid.period(j));
    out.col(c).setConstant(mean + v);
  }
  return out;
}

}  // namespace relax
