#include "relax/validator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace relax {

namespace {

std::vector<Vector> lattice_states(const StateBox& box) {
  const int k = box.dim();
  const int per_axis = k == 1 ? 9 : (k == 2 ? 5 : 3);
  std::vector<Vector> out;
  std::vector<int> idx(k, 0);
  while (true) {
    Vector u(k);
    for (int c = 0; c < k; ++c) {
      const double s = static_cast<double>(idx[c]) / (per_axis - 1);
      u[c] = box.lower[c] + s * (box.upper[c] - box.lower[c]);
    }
    out.push_back(u);
    int c = 0;
    while (c < k && ++idx[c] == per_axis) idx[c++] = 0;
    if (c == k) break;
  }
  return out;
}

std::vector<Vector> nonconserved_states(int m, double radius) {
  std::vector<Vector> out{Vector::Zero(m)};
  for (int c = 0; c < m; ++c) {
    Vector z = Vector::Zero(m);
    z[c] = radius;
    out.push_back(z);
    out.push_back(-z);
  }
  return out;
}

CheckEntry failed_entry(std::string name, double margin, Witness w, std::string note) {
  CheckEntry e;
  e.name = std::move(name);
  e.passed = false;
  e.margin = margin;
  e.witness = std::move(w);
  e.note = std::move(note);
  return e;
}

Point zero_xi(const RelaxationSystem& sys) { return Point::Zero(sys.d); }

}  // namespace

SampleSet SampleSet::make(const SpatialGrid& grid, const StateBox& box, int directions,
                          int max_points) {
  SampleSet s;
  s.box = box;
  if (grid.dim() == 1) {
    s.directions = {Point::Constant(1, -1.0), Point::Constant(1, 1.0)};
    const int count = std::min(max_points, grid.size());
    for (int i = 0; i < count; ++i) s.points.push_back(grid.point(i * grid.size() / count));
  } else {
    for (int i = 0; i < directions; ++i) {
      const double theta = 2.0 * std::numbers::pi * i / directions;
      Point xi(2);
      xi << std::cos(theta), std::sin(theta);
      s.directions.push_back(xi);
    }
    const int p = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(max_points)))));
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        s.points.push_back(grid.point(grid.index(a * grid.cells(0) / p, b * grid.cells(1) / p)));
  }
  s.states = lattice_states(box);
  return s;
}

bool ValidationReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.passed; });
}

const CheckEntry* ValidationReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

int ValidationReport::failures() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(),
                                        [](const CheckEntry& e) { return !e.passed; }));
}

CheckEntry check_hyperbolicity(const RelaxationSystem& sys, const SampleSet& samples) {
  const Complex i(0.0, 1.0);
  double worst = 0.0;
  for (const auto& x : samples.points) {
    for (const auto& xi : samples.directions) {
      const CMatrix a = i * principal_symbol(sys, x, xi);
      Eigen::ComplexEigenSolver<CMatrix> es(a, false);
      if (es.info() != Eigen::Success) {
        return failed_entry("hyperbolicity", std::numeric_limits<double>::infinity(),
                            {x, xi, Vector(), std::numeric_limits<double>::quiet_NaN()},
                            "eigenvalue solver did not converge");
      }
      const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
      const double imag = es.eigenvalues().imag().cwiseAbs().maxCoeff();
      const double rel = radius > 0.0 ? imag / radius : 0.0;
      worst = std::max(worst, rel);
      if (imag > kSpectrumTolerance * radius) {
        return failed_entry("hyperbolicity", rel, {x, xi, Vector(), imag},
                            "transport symbol has non-real characteristic speeds");
      }
    }
  }
  return {"hyperbolicity", true, worst, std::nullopt, ""};
}

CheckEntry check_conserved_block(const RelaxationSystem& sys, const SampleSet& samples) {
  double worst = 0.0;
  double scale = 0.0;
  Witness worst_w;
  for (const auto& x : samples.points) {
    for (const auto& xi : samples.directions) {
      const CMatrix s = principal_symbol(sys, x, xi);
      const double n = s.topLeftCorner(sys.k, sys.k).norm();
      scale = std::max(scale, s.norm());
      if (n > worst) {
        worst = n;
        worst_w = {x, xi, Vector(), n};
      }
    }
  }
  // Round-off from a numerical decoupling P A P^{-1} is not a genuine M11.
  if (worst > 1e-12 * std::max(1.0, scale)) {
    return failed_entry("conserved_block", worst, worst_w,
                        "null-limit: conserved-block transport is nonzero so the formal "
                        "relaxation limit is the zero solution");
  }
  return {"conserved_block", true, worst, std::nullopt, ""};
}

CheckEntry check_rank_condition(const RelaxationSystem& sys, const SampleSet& samples) {
  if (sys.k > sys.m) {
    Witness w{samples.points.empty() ? zero_xi(sys) : samples.points.front(),
              samples.directions.empty() ? zero_xi(sys) : samples.directions.front(), Vector(),
              0.0};
    return failed_entry("rank_condition", 0.0, w,
                        "more conserved than non-conserved components: Gram determinant vanishes");
  }
  double worst = std::numeric_limits<double>::infinity();
  Witness worst_w;
  for (const auto& x : samples.points) {
    for (const auto& xi : samples.directions) {
      const CMatrix s21 = operator_symbol(sys, x, xi).bottomLeftCorner(sys.m, sys.k);
      const double det = (s21.adjoint() * s21).determinant().real();
      if (det < worst) {
        worst = det;
        worst_w = {x, xi, Vector(), det};
      }
    }
  }
  if (!(worst > kDeterminantFloor)) {
    return failed_entry("rank_condition", worst, worst_w,
                        "Gram determinant of the M21 symbol below floor");
  }
  return {"rank_condition", true, worst, std::nullopt, ""};
}

CheckEntry check_dissipativity(const RelaxationSystem& sys, const SampleSet& samples) {
  double worst = -std::numeric_limits<double>::infinity();
  Witness worst_w;
  const auto zs = nonconserved_states(sys.m, samples.nonconserved_radius);
  for (const auto& x : samples.points) {
    for (const auto& u : samples.states) {
      for (const auto& z : zs) {
        Matrix q;
        try {
          q = stiff_jacobian(sys, x, u, z);
        } catch (const SolverError& err) {
          return failed_entry("dissipativity", -std::numeric_limits<double>::infinity(),
                              {x, zero_xi(sys), u, std::numeric_limits<double>::quiet_NaN()},
                              err.what());
        }
        const double top = max_symmetric_eigenvalue(q);
        if (top > worst) {
          worst = top;
          worst_w = {x, zero_xi(sys), u, top};
        }
      }
    }
  }
  const double lambda0 = -worst;
  if (!(lambda0 > 0.0)) {
    return failed_entry("dissipativity", lambda0, worst_w,
                        "symmetric part of Q_nu is not negative definite on the box");
  }
  return {"dissipativity", true, lambda0, std::nullopt, ""};
}

CheckEntry check_symmetrizer(const RelaxationSystem& sys, const Symmetrizer& r,
                             const SampleSet& samples) {
  double worst = 0.0;
  for (const auto& x : samples.points) {
    for (const auto& xi : samples.directions) {
      const Matrix r11 = r.r11(x, xi);
      const Matrix r22 = r.r22(x, xi);
      if (r11.rows() != sys.k || r11.cols() != sys.k || r22.rows() != sys.m || r22.cols() != sys.m)
        throw DimensionError("symmetrizer blocks do not match (k, m)");
      for (const Matrix* blk : {&r11, &r22}) {
        const double asym = (*blk - blk->transpose()).norm();
        if (asym > 1e-12 * std::max(1.0, blk->norm())) {
          return failed_entry("symmetrizer", asym, {x, xi, Vector(), asym},
                              "symmetrizer block is not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(*blk, Eigen::EigenvaluesOnly);
        const double low = es.eigenvalues().minCoeff();
        if (low < r.floor) {
          return failed_entry("symmetrizer", low, {x, xi, Vector(), low},
                              "symmetrizer block eigenvalue below positivity floor");
        }
      }
      CMatrix rr = CMatrix::Zero(sys.size(), sys.size());
      rr.topLeftCorner(sys.k, sys.k) = r11.cast<Complex>();
      rr.bottomRightCorner(sys.m, sys.m) = r22.cast<Complex>();
      const CMatrix rm = rr * principal_symbol(sys, x, xi);
      const double scale = rm.norm();
      const double resid = (rm + rm.adjoint()).norm();
      const double rel = scale > 0.0 ? resid / scale : 0.0;
      worst = std::max(worst, rel);
      if (resid > kSpectrumTolerance * scale) {
        return failed_entry("symmetrizer", rel, {x, xi, Vector(), resid},
                            "R times the principal symbol is not skew-Hermitian");
      }
    }
  }
  return {"symmetrizer", true, worst, std::nullopt, ""};
}

namespace {

template <typename Generator>
CheckEntry parabolicity(const std::string& name, ParabolicityMode mode,
                        const std::vector<Point>& points, const std::vector<Point>& directions,
                        const std::vector<Vector>& states, Generator&& generator) {
  double best = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  Witness worst_w;
  for (const auto& x : points) {
    for (const auto& u : states) {
      for (const auto& xi : directions) {
        Matrix g;
        try {
          g = generator(x, u, xi);
        } catch (const SingularMatrixError& err) {
          return failed_entry(name, -std::numeric_limits<double>::infinity(),
                              {x, xi, u, err.smallest()}, err.what());
        }
        double value;
        if (mode == ParabolicityMode::petrowski) {
          Eigen::EigenSolver<Matrix> es(g, false);
          if (es.info() != Eigen::Success) {
            return failed_entry(name, -std::numeric_limits<double>::infinity(),
                                {x, xi, u, std::numeric_limits<double>::quiet_NaN()},
                                "eigenvalue solver did not converge");
          }
          value = -es.eigenvalues().real().maxCoeff();
          scale = std::max(scale, es.eigenvalues().cwiseAbs().maxCoeff());
        } else {
          Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_part(Matrix(-g)),
                                                   Eigen::EigenvaluesOnly);
          value = es.eigenvalues().minCoeff();
          scale = std::max(scale, es.eigenvalues().cwiseAbs().maxCoeff());
        }
        if (value < best) {
          best = value;
          worst_w = {x, xi, u, value};
        }
      }
    }
  }
  if (!(best > kSpectrumTolerance * scale) || scale == 0.0) {
    return failed_entry(name, best, worst_w,
                        mode == ParabolicityMode::petrowski
                            ? "generator has an eigenvalue with non-negative real part"
                            : "symmetric part of the diffusion symbol is not positive definite");
  }
  return {name, true, best, std::nullopt, ""};
}

}  // namespace

CheckEntry check_petrowski(const ParabolicTarget& target, const SampleSet& samples,
                           ParabolicityMode mode) {
  const std::string name =
      mode == ParabolicityMode::strong ? "strong_parabolicity" : "target_petrowski";
  return parabolicity(name, mode, samples.points, samples.directions, samples.states,
                      [&](const Point& x, const Vector& u, const Point& xi) {
                        return target_generator(target, x, u, xi);
                      });
}

CheckEntry check_petrowski(const RelaxationSystem& sys, const SampleSet& samples,
                           ParabolicityMode mode) {
  const std::string name =
      mode == ParabolicityMode::strong ? "limit_strong_parabolicity" : "petrowski";
  return parabolicity(name, mode, samples.points, samples.directions, samples.states,
                      [&](const Point& x, const Vector& u, const Point& xi) {
                        return limit_generator(sys, x, u, xi);
                      });
}

CheckEntry check_coefficient_regularity(const RelaxationSystem& sys, const SampleSet& samples) {
  double worst = 0.0;
  if (sys.is_multiplier()) {
    // First-order symbol class: B must be finite and positively homogeneous of degree one.
    for (const auto& xi : samples.directions) {
      const Matrix b1 = sys.multiplier(xi);
      const Matrix b2 = sys.multiplier(2.0 * xi);
      if (!b1.allFinite() || !b2.allFinite()) {
        return failed_entry("coefficient_regularity", std::numeric_limits<double>::infinity(),
                            {zero_xi(sys), xi, Vector(), std::numeric_limits<double>::quiet_NaN()},
                            "multiplier symbol is not finite");
      }
      const double dev = (b2 - 2.0 * b1).norm() / std::max(1.0, b1.norm());
      worst = std::max(worst, dev);
      if (dev > kSpectrumTolerance) {
        return failed_entry("coefficient_regularity", dev, {zero_xi(sys), xi, Vector(), dev},
                            "multiplier symbol is not homogeneous of degree one");
      }
    }
    return {"coefficient_regularity", true, worst, std::nullopt, ""};
  }
  const double delta = 1e-4;
  for (const auto& x : samples.points) {
    for (int j = 0; j < sys.d; ++j) {
      const TransportBlocks b = sys.transport(x, j);
      const bool finite = b.m12.allFinite() && b.m21.allFinite() && b.m22.allFinite() &&
                          (b.m11.size() == 0 || b.m11.allFinite());
      if (!finite) {
        return failed_entry("coefficient_regularity", std::numeric_limits<double>::infinity(),
                            {x, zero_xi(sys), Vector(), std::numeric_limits<double>::quiet_NaN()},
                            "transport coefficient is not finite");
      }
      if (sys.constant_coefficients) continue;
      for (int a = 0; a < sys.d; ++a) {
        Point xp = x, xm = x;
        xp[a] += delta;
        xm[a] -= delta;
        const TransportBlocks bp = sys.transport(xp, j), bm = sys.transport(xm, j);
        double grad = ((bp.m12 - bm.m12).norm() + (bp.m21 - bm.m21).norm() +
                       (bp.m22 - bm.m22).norm()) / (2.0 * delta);
        if (!std::isfinite(grad)) {
          return failed_entry("coefficient_regularity", grad, {x, zero_xi(sys), Vector(), grad},
                              "transport coefficient gradient is not finite");
        }
        worst = std::max(worst, grad);
      }
    }
  }
  return {"coefficient_regularity", true, worst, std::nullopt, ""};
}

CheckEntry check_lower_order(const RelaxationSystem& sys, const SampleSet& samples) {
  const double zero_tol = 1e-12;
  double lipschitz = 0.0;
  const Vector zero_z = Vector::Zero(sys.m);
  for (const auto& x : samples.points) {
    for (const auto& u : samples.states) {
      if (sys.scaled_lower_conserved) {
        for (double eps : {1.0, 0.1}) {
          const double n = sys.scaled_lower_conserved(x, u, zero_z, eps).norm();
          if (!(n <= zero_tol * (1.0 + u.norm()))) {
            return failed_entry("lower_order_lipschitz", n, {x, zero_xi(sys), u, n},
                                "conserved lower-order term does not vanish at v = 0");
          }
        }
      }
    }
    if (sys.lower_nonconserved) {
      const double n = sys.lower_nonconserved(x, Vector::Zero(sys.k), zero_z).norm();
      if (!(n <= zero_tol)) {
        return failed_entry("lower_order_lipschitz", n,
                            {x, zero_xi(sys), Vector::Zero(sys.k), n},
                            "non-conserved lower-order term does not vanish at the origin");
      }
    }
    // Sampled difference quotients over consecutive box states.
    for (std::size_t s = 1; s < samples.states.size(); ++s) {
      const Vector& a = samples.states[s - 1];
      const Vector& b = samples.states[s];
      const double dist = (a - b).norm();
      if (dist == 0.0) continue;
      double q = 0.0;
      if (sys.lower_nonconserved)
        q = std::max(q, (sys.lower_nonconserved(x, a, zero_z) -
                         sys.lower_nonconserved(x, b, zero_z)).norm() / dist);
      if (sys.conserved_source)
        q = std::max(q, (sys.conserved_source(x, a) - sys.conserved_source(x, b)).norm() / dist);
      if (!std::isfinite(q)) {
        return failed_entry("lower_order_lipschitz", q, {x, zero_xi(sys), a, q},
                            "lower-order terms are not Lipschitz on the box");
      }
      lipschitz = std::max(lipschitz, q);
    }
  }
  return {"lower_order_lipschitz", true, lipschitz, std::nullopt, ""};
}

ValidationReport validate_all(const RelaxationSystem& sys, const ParabolicTarget* target,
                              const Symmetrizer* r, const SampleSet& samples) {
  if (samples.points.empty() || samples.directions.empty() || samples.states.empty())
    throw PreconditionError("validate_all: empty sample set");
  for (const auto& xi : samples.directions)
    if (std::abs(xi.norm() - 1.0) > 1e-12) throw PreconditionError("sample directions must be unit");

  ValidationReport report;
  report.entries.push_back(check_hyperbolicity(sys, samples));
  report.entries.push_back(check_conserved_block(sys, samples));
  report.entries.push_back(check_rank_condition(sys, samples));
  report.entries.push_back(check_coefficient_regularity(sys, samples));
  report.entries.push_back(check_lower_order(sys, samples));
  report.entries.push_back(check_dissipativity(sys, samples));
  const Symmetrizer identity = Symmetrizer::identity(sys.k, sys.m);
  report.entries.push_back(check_symmetrizer(sys, r ? *r : identity, samples));
  report.entries.push_back(check_petrowski(sys, samples, ParabolicityMode::petrowski));
  if (target) report.entries.push_back(check_petrowski(*target, samples, ParabolicityMode::strong));
  return report;
}

}  // namespace relax
