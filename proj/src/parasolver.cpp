#include "relax/parasolver.hpp"

#include "relax/fourier.hpp"
#include "relax/symbol.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace relax {

namespace {

using Sparse = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

std::vector<double> snapshot_marks(double T, double stride) {
  std::vector<double> marks;
  if (stride > 0.0) {
    for (int i = 1;; ++i) {
      const double t = i * stride;
      if (t >= T * (1.0 - 1e-12)) break;
      marks.push_back(t);
    }
  }
  if (T > 0.0) marks.push_back(T);
  return marks;
}

Vector flatten(const Matrix& u) { return Eigen::Map<const Vector>(u.data(), u.size()); }
Matrix unflatten(const Vector& v, int k) { return Eigen::Map<const Matrix>(v.data(), k, v.size() / k); }

void add_block(Triplets& t, int k, int row_cell, int col_cell, const Matrix& b, double scale) {
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c)
      if (b(r, c) != 0.0) t.emplace_back(row_cell * k + r, col_cell * k + c, scale * b(r, c));
}

ReferenceTrajectory spectral_reference(const ReactionDiffusion& target, const Matrix& u0,
                                       const SpatialGrid& grid, double T,
                                       const ReferenceOptions& opts) {
  const int k = target.k, d = target.d;
  const FourierGrid fourier(grid);
  const int n = grid.size();
  const Matrix a = target.diffusion(Point::Zero(d));

  std::vector<Matrix> symbols(n);
  for (int mode = 0; mode < n; ++mode) {
    const Point xi = fourier.wavenumber(mode);
    Matrix s = Matrix::Zero(k, k);
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l) s += xi[j] * xi[l] * block_of(a, k, j, l);
    symbols[mode] = s;
  }

  auto to_coeffs = [&](const Matrix& u) {
    CMatrix c(k, n);
    for (int r = 0; r < k; ++r) c.row(r) = fourier.forward(u.row(r).transpose()).transpose();
    return c;
  };
  auto to_field = [&](const CMatrix& c) {
    Matrix u(k, n);
    for (int r = 0; r < k; ++r) u.row(r) = fourier.inverse(c.row(r).transpose()).transpose();
    return u;
  };

  ReferenceTrajectory out;
  out.times.push_back(0.0);
  out.states.push_back(u0);
  Matrix u = u0;
  double t = 0.0;
  double cached_dt = -1.0;
  std::vector<Matrix> props;
  for (double mark : snapshot_marks(T, opts.snapshot_stride)) {
    const double span = mark - t;
    const int nsub = target.reaction ? std::max(1, static_cast<int>(std::ceil(span / opts.dt - 1e-9))) : 1;
    const double dt = span / nsub;
    if (dt != cached_dt) {
      props.assign(n, Matrix());
      for (int mode = 0; mode < n; ++mode) props[mode] = Matrix(-dt * symbols[mode]).exp();
      cached_dt = dt;
    }
    for (int s = 0; s < nsub; ++s) {
      Matrix rhs = u;
      if (target.reaction)
        for (int c = 0; c < n; ++c) rhs.col(c) += dt * target.reaction(u.col(c));
      CMatrix coeffs = to_coeffs(rhs);
      for (int mode = 0; mode < n; ++mode) coeffs.col(mode) = props[mode].cast<Complex>() * coeffs.col(mode);
      u = to_field(coeffs);
    }
    t = mark;
    out.times.push_back(t);
    out.states.push_back(u);
  }
  return out;
}

// Finite-difference operators. `diffusion` assembles L(u_lag) acting on the
// flattened unknowns (cell-major, component-minor); `explicit_terms` returns
// the advection and source contributions evaluated at u.
struct FiniteDifferenceModel {
  std::function<Sparse(const Matrix& lag)> diffusion;
  std::function<Matrix(const Matrix& u)> explicit_terms;
  bool lagged = false;  // diffusion depends on u
};

FiniteDifferenceModel fd_reaction_diffusion(const ReactionDiffusion& target, const SpatialGrid& grid) {
  const int k = target.k, d = target.d, n = grid.size();
  FiniteDifferenceModel model;
  model.diffusion = [&target, &grid, k, d, n](const Matrix&) {
    Triplets t;
    for (int c = 0; c < n; ++c) {
      const Matrix a = target.diffusion(grid.point(c));
      for (int j = 0; j < d; ++j) {
        for (int l = 0; l < d; ++l) {
          const Matrix b = block_of(a, k, j, l);
          if (j == l) {
            const double w = 1.0 / (grid.spacing(j) * grid.spacing(j));
            add_block(t, k, c, grid.neighbour(c, j, 1), b, w);
            add_block(t, k, c, c, b, -2.0 * w);
            add_block(t, k, c, grid.neighbour(c, j, -1), b, w);
          } else {
            const double w = 1.0 / (4.0 * grid.spacing(j) * grid.spacing(l));
            for (int sj : {-1, 1})
              for (int sl : {-1, 1})
                add_block(t, k, c, grid.neighbour(grid.neighbour(c, j, sj), l, sl), b, w * sj * sl);
          }
        }
      }
    }
    Sparse s(k * n, k * n);
    s.setFromTriplets(t.begin(), t.end());
    return s;
  };
  model.explicit_terms = [&target, k, n](const Matrix& u) {
    Matrix e = Matrix::Zero(k, n);
    if (target.reaction)
      for (int c = 0; c < n; ++c) e.col(c) = target.reaction(u.col(c));
    return e;
  };
  return model;
}

FiniteDifferenceModel fd_quasilinear(const QuasilinearDivergence& target, const SpatialGrid& grid) {
  const int k = target.k, d = target.d, n = grid.size();
  FiniteDifferenceModel model;
  model.lagged = true;
  model.diffusion = [&target, &grid, k, d, n](const Matrix& lag) {
    std::vector<Matrix> mob(n);
    for (int c = 0; c < n; ++c) mob[c] = target.mobility(lag.col(c));
    Triplets t;
    // Face flux through (c, c + e_i): sum_j B_ij,face (d_j u)_face.
    for (int c = 0; c < n; ++c) {
      for (int i = 0; i < d; ++i) {
        const int right = grid.neighbour(c, i, 1);
        const Matrix bf = 0.5 * (mob[c] + mob[right]);
        const double hi = grid.spacing(i);
        for (int j = 0; j < d; ++j) {
          const Matrix b = block_of(bf, k, i, j);
          std::vector<std::pair<int, double>> stencil;
          if (j == i) {
            stencil = {{right, 1.0 / hi}, {c, -1.0 / hi}};
          } else {
            const double w = 1.0 / (4.0 * grid.spacing(j));
            stencil = {{grid.neighbour(c, j, 1), w},
                       {grid.neighbour(c, j, -1), -w},
                       {grid.neighbour(right, j, 1), w},
                       {grid.neighbour(right, j, -1), -w}};
          }
          // The flux leaves c and enters `right`.
          for (const auto& [cell, w] : stencil) {
            add_block(t, k, c, cell, b, w / hi);
            add_block(t, k, right, cell, b, -w / hi);
          }
        }
      }
    }
    Sparse s(k * n, k * n);
    s.setFromTriplets(t.begin(), t.end());
    return s;
  };
  model.explicit_terms = [&target, &grid, k, d, n](const Matrix& u) {
    Matrix e = Matrix::Zero(k, n);
    if (target.flux) {
      Matrix f(k * d, n);
      for (int c = 0; c < n; ++c) f.col(c) = target.flux(u.col(c));
      for (int c = 0; c < n; ++c) {
        for (int i = 0; i < d; ++i) {
          const int right = grid.neighbour(c, i, 1);
          const Vector face = 0.5 * (f.col(c).segment(i * k, k) + f.col(right).segment(i * k, k));
          e.col(c) -= face / grid.spacing(i);
          e.col(right) += face / grid.spacing(i);
        }
      }
    }
    if (target.source)
      for (int c = 0; c < n; ++c) e.col(c) += target.source(u.col(c));
    return e;
  };
  return model;
}

ReferenceTrajectory fd_reference(const FiniteDifferenceModel& model, int k, const Matrix& u0,
                                 const SpatialGrid& grid, double T, const ReferenceOptions& opts) {
  const int n = grid.size();
  const int size = k * n;
  Sparse identity(size, size);
  identity.setIdentity();

  ReferenceTrajectory out;
  out.times.push_back(0.0);
  out.states.push_back(u0);

  Eigen::SparseLU<Sparse> lu;
  bool analysed = false;
  Sparse fixed_l;
  if (!model.lagged) fixed_l = model.diffusion(u0);
  double factored_a0 = -1.0, factored_dt = -1.0;

  Matrix u = u0, uprev = u0;
  double dt_prev = 0.0;
  double t = 0.0;
  for (double mark : snapshot_marks(T, opts.snapshot_stride)) {
    const double span = mark - t;
    const int nsub = std::max(1, static_cast<int>(std::ceil(span / opts.dt - 1e-9)));
    const double dt = span / nsub;
    for (int s = 0; s < nsub; ++s) {
      // Variable-step BDF2; the first step is backward Euler.
      double a0, a1, a2;
      Matrix extrap, expl;
      if (dt_prev == 0.0) {
        a0 = 1.0;
        a1 = 1.0;
        a2 = 0.0;
        extrap = u;
        expl = model.explicit_terms(u);
      } else {
        const double w = dt / dt_prev;
        a0 = (1.0 + 2.0 * w) / (1.0 + w);
        a1 = 1.0 + w;
        a2 = -w * w / (1.0 + w);
        extrap = (1.0 + w) * u - w * uprev;
        expl = (1.0 + w) * model.explicit_terms(u) - w * model.explicit_terms(uprev);
      }
      const Vector rhs = flatten(a1 * u + a2 * uprev + dt * expl);

      Vector next;
      if (!model.lagged) {
        if (a0 != factored_a0 || dt != factored_dt) {
          const Sparse sys = a0 * identity - dt * fixed_l;
          if (!analysed) {
            lu.analyzePattern(sys);
            analysed = true;
          }
          lu.factorize(sys);
          if (lu.info() != Eigen::Success) throw SolverError("reference: sparse factorization failed");
          factored_a0 = a0;
          factored_dt = dt;
        }
        next = lu.solve(rhs);
      } else {
        Matrix lag = extrap;
        bool converged = false;
        for (int it = 0; it < opts.picard_max_iterations; ++it) {
          const Sparse sys = a0 * identity - dt * model.diffusion(lag);
          if (!analysed) {
            lu.analyzePattern(sys);
            analysed = true;
          }
          lu.factorize(sys);
          if (lu.info() != Eigen::Success) throw SolverError("reference: sparse factorization failed");
          next = lu.solve(rhs);
          const Matrix cand = unflatten(next, k);
          const double change = (cand - lag).cwiseAbs().maxCoeff();
          lag = cand;
          if (change <= opts.picard_tolerance * (1.0 + cand.cwiseAbs().maxCoeff())) {
            converged = true;
            break;
          }
        }
        if (!converged) {
          throw SolverError("reference: lagged-coefficient iteration did not converge at t=" +
                            format_double(t + (s + 1) * dt));
        }
      }
      if (!next.allFinite()) throw SolverError("reference: non-finite state at t=" + format_double(t + (s + 1) * dt));
      uprev = u;
      u = unflatten(next, k);
      dt_prev = dt;
    }
    t = mark;
    out.times.push_back(t);
    out.states.push_back(u);
  }
  return out;
}

}  // namespace

ReferenceTrajectory run_reference(const ParabolicTarget& target, const Matrix& u0,
                                  const SpatialGrid& grid, double T, const ReferenceOptions& opts) {
  const int k = target_components(target);
  if (target_dimension(target) != grid.dim()) throw DimensionError("reference: grid dimension");
  if (u0.rows() != k || u0.cols() != grid.size()) throw DimensionError("reference: field shape");
  if (!(opts.dt > 0.0)) throw PreconditionError("reference: dt must be positive");
  if (!(T >= 0.0)) throw PreconditionError("reference: T must be >= 0");

  if (const auto* rd = std::get_if<ReactionDiffusion>(&target)) {
    if (rd->constant_coefficients) return spectral_reference(*rd, u0, grid, T, opts);
    return fd_reference(fd_reaction_diffusion(*rd, grid), k, u0, grid, T, opts);
  }
  const auto& ql = std::get<QuasilinearDivergence>(target);
  return fd_reference(fd_quasilinear(ql, grid), k, u0, grid, T, opts);
}

double mode_symbol(const Matrix& a, const Point& xi) {
  if (a.rows() != xi.size() || a.cols() != xi.size()) throw DimensionError("mode_symbol: A must be d x d");
  return xi.dot(a * xi);
}

double parabolic_mode_factor(double symbol, double t) { return std::exp(-symbol * t); }

RelaxationRoots relaxation_roots(double symbol, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("relaxation_roots: eps must be positive");
  const double e2 = eps * eps;
  const Complex disc = std::sqrt(Complex(1.0 - 4.0 * e2 * symbol, 0.0));
  // Stable forms: slow root -2 symbol / (1 + disc), fast root (-1 - disc) / (2 eps^2).
  return {-2.0 * symbol / (1.0 + disc), (-1.0 - disc) / (2.0 * e2)};
}

double relaxation_mode_amplitude(double symbol, double eps, double t, double u0, double du0) {
  const RelaxationRoots r = relaxation_roots(symbol, eps);
  const Complex gap = r.slow - r.fast;
  if (std::abs(gap) <= 1e-12 * std::abs(r.fast)) {
    const Complex l = r.slow;
    return std::real((u0 + (du0 - l * u0) * t) * std::exp(l * t));
  }
  const Complex c_slow = (du0 - r.fast * u0) / gap;
  const Complex c_fast = (r.slow * u0 - du0) / gap;
  return std::real(c_slow * std::exp(r.slow * t) + c_fast * std::exp(r.fast * t));
}

}  // namespace relax
