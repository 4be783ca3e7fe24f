#include "relax/builder.hpp"

#include "relax/fourier.hpp"
#include "relax/symbol.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace relax {

namespace {

std::vector<Vector> box_lattice(const StateBox& box, int per_axis) {
  const int k = box.dim();
  std::vector<Vector> out;
  std::vector<int> idx(k, 0);
  while (true) {
    Vector u(k);
    for (int c = 0; c < k; ++c)
      u[c] = box.lower[c] + (box.upper[c] - box.lower[c]) * idx[c] / (per_axis - 1);
    out.push_back(u);
    int c = 0;
    while (c < k && ++idx[c] == per_axis) idx[c++] = 0;
    if (c == k) break;
  }
  return out;
}

std::vector<Point> default_probes(int d, bool constant) {
  std::vector<Point> out{Point::Zero(d)};
  if (!constant) {
    for (double s : {0.125, 0.375, 0.625, 0.875}) out.push_back(Point::Constant(d, s));
  }
  return out;
}

Matrix selector(int k, int d, int j) {
  Matrix e = Matrix::Zero(k, k * d);
  e.block(0, j * k, k, k).setIdentity();
  return e;
}

Matrix sqrt_spd(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

RelaxationSystem decouple(const RawSystem& raw, const DecouplingTransform& transform,
                          std::span<const Point> probe_points) {
  const int n = raw.n;
  const int k = transform.k;
  if (transform.p.rows() != n || transform.p.cols() != n)
    throw DimensionError("decouple: P must be N x N");
  if (k <= 0 || k >= n) throw DimensionError("decouple: row split k must satisfy 0 < k < N");
  if (raw.source_rank >= 0 && raw.source_rank != n - k)
    throw DimensionError("decouple: declared source rank does not equal N - k");
  if (!raw.coefficients || !raw.source) throw PreconditionError("decouple: raw system is incomplete");

  const double det = transform.p.determinant();
  if (!(std::abs(det) > 1e-12)) {
    throw SingularMatrixError("decouple: P is singular (det " + format_double(det) + ")",
                              std::abs(det));
  }

  const Matrix p = transform.p;
  const Matrix pinv = p.inverse();
  const Matrix p1 = transform.conserved_rows();
  const Matrix p2 = transform.nonconserved_rows();

  std::vector<Point> probes(probe_points.begin(), probe_points.end());
  if (probes.empty()) probes = default_probes(raw.d, raw.constant_coefficients);
  if (raw.probe_box.dim() != n) throw DimensionError("decouple: probe box must have N components");
  double worst = 0.0;
  Point worst_x;
  Vector worst_w;
  for (const auto& x : probes) {
    for (const auto& w : box_lattice(raw.probe_box, n <= 2 ? 9 : 4)) {
      const Vector b = raw.source(x, w);
      const double r = (p1 * b).norm() / (1.0 + b.norm());
      if (r > worst) {
        worst = r;
        worst_x = x;
        worst_w = w;
      }
    }
  }
  if (worst > 1e-10) {
    throw PreconditionError("decouple: P^I B != 0 at x=" + format_vector(worst_x) +
                            " W=" + format_vector(worst_w) + " (relative residual " +
                            format_double(worst) + ")");
  }

  const int m = n - k;
  RelaxationSystem sys;
  sys.name = raw.name;
  sys.k = k;
  sys.m = m;
  sys.d = raw.d;
  sys.constant_coefficients = raw.constant_coefficients;
  auto coeff = raw.coefficients;
  sys.transport = [coeff, p, pinv, k, m](const Point& x, int axis) {
    const Matrix a = p * coeff(x, axis) * pinv;
    return TransportBlocks{a.topLeftCorner(k, k), a.topRightCorner(k, m), a.bottomLeftCorner(m, k),
                           a.bottomRightCorner(m, m)};
  };
  auto src = raw.source;
  sys.source = [src, pinv, p2, k, m](const Point& x, const Vector& u, const Vector& z) {
    Vector zz(k + m);
    zz << u, z;
    return Vector(p2 * src(x, pinv * zz));
  };
  if (raw.source_jacobian) {
    auto jac = raw.source_jacobian;
    sys.source_jacobian = [jac, pinv, p2, k, m](const Point& x, const Vector& u, const Vector& z) {
      Vector zz(k + m);
      zz << u, z;
      return Matrix(p2 * jac(x, pinv * zz) * pinv.rightCols(m));
    };
  }
  if (raw.lower_order) {
    auto low = raw.lower_order;
    sys.scaled_lower_conserved = [low, pinv, p1, k, m](const Point& x, const Vector& u,
                                                        const Vector& v, double eps) {
      Vector zz(k + m);
      zz << u, eps * v;
      return Vector(p1 * low(x, pinv * zz) / eps);
    };
    sys.lower_nonconserved = [low, pinv, p2, k, m](const Point& x, const Vector& u,
                                                   const Vector& z) {
      Vector zz(k + m);
      zz << u, z;
      return Vector(p2 * low(x, pinv * zz));
    };
  }
  return sys;
}

std::vector<Matrix> recouple(const RelaxationSystem& sys, const DecouplingTransform& transform,
                             const Point& x) {
  if (sys.is_multiplier()) throw DimensionError("recouple: multiplier systems have no A_j");
  const int n = sys.size();
  if (transform.p.rows() != n || transform.k != sys.k)
    throw DimensionError("recouple: transform does not match system");
  const Matrix pinv = transform.p.inverse();
  std::vector<Matrix> out;
  for (int j = 0; j < sys.d; ++j) {
    const TransportBlocks b = sys.transport(x, j);
    Matrix a = Matrix::Zero(n, n);
    if (b.m11.size()) a.topLeftCorner(sys.k, sys.k) = b.m11;
    a.topRightCorner(sys.k, sys.m) = b.m12;
    a.bottomLeftCorner(sys.m, sys.k) = b.m21;
    a.bottomRightCorner(sys.m, sys.m) = b.m22;
    out.push_back(pinv * a * transform.p);
  }
  return out;
}

RelaxationSystem from_reaction_diffusion(const ReactionDiffusion& target,
                                         std::span<const Point> probe_points) {
  const int k = target.k, d = target.d;
  if (k <= 0 || d <= 0 || d > 2) throw DimensionError("reaction-diffusion: need k >= 1, d in {1, 2}");
  if (!target.diffusion) throw PreconditionError("reaction-diffusion: diffusion matrix missing");

  std::vector<Point> probes(probe_points.begin(), probe_points.end());
  if (probes.empty()) probes = default_probes(d, target.constant_coefficients);
  for (const auto& x : probes) {
    const Matrix a = target.diffusion(x);
    if (a.rows() != k * d || a.cols() != k * d)
      throw DimensionError("reaction-diffusion: A must be kd x kd");
    const double asym = (a - a.transpose()).norm();
    if (asym > 1e-12 * std::max(1.0, a.norm())) {
      throw SingularMatrixError("reaction-diffusion: block matrix A is not symmetric at x=" +
                                    format_vector(x),
                                0.0);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (!(lmin > 0.0)) {
      throw SingularMatrixError("reaction-diffusion: A not positive definite at x=" +
                                    format_vector(x) + " (smallest eigenvalue " +
                                    format_double(lmin) + ")",
                                lmin);
    }
  }

  RelaxationSystem sys;
  sys.name = "reaction-diffusion";
  sys.k = k;
  sys.m = k * d;
  sys.d = d;
  sys.constant_coefficients = target.constant_coefficients;
  auto diff = target.diffusion;
  sys.transport = [diff, k, d](const Point& x, int axis) {
    const Matrix a = diff(x);
    const Matrix bj = a.block(axis * k, 0, k, k * d);
    return TransportBlocks{Matrix(), bj, bj.transpose(), Matrix::Zero(k * d, k * d)};
  };
  sys.source = [diff](const Point& x, const Vector&, const Vector& z) {
    return Vector(-(diff(x) * z));
  };
  sys.source_jacobian = [diff](const Point& x, const Vector&, const Vector&) {
    return Matrix(-diff(x));
  };
  sys.source_linear = true;
  sys.source_jacobian_constant = true;
  if (target.reaction) {
    auto f = target.reaction;
    sys.conserved_source = [f](const Point&, const Vector& u) { return f(u); };
  }
  return sys;
}

RelaxationSystem from_quasilinear(const QuasilinearDivergence& target) {
  const int k = target.k, d = target.d;
  if (k <= 0 || d <= 0 || d > 2) throw DimensionError("quasilinear: need k >= 1, d in {1, 2}");
  if (!target.mobility) throw PreconditionError("quasilinear: mobility matrix missing");
  if (target.box.dim() != k) throw DimensionError("quasilinear: state box must have k components");

  for (const auto& u : box_lattice(target.box, k == 1 ? 33 : (k == 2 ? 9 : 4))) {
    const Matrix b = target.mobility(u);
    if (b.rows() != k * d || b.cols() != k * d) throw DimensionError("quasilinear: B must be kd x kd");
    Eigen::JacobiSVD<Matrix> svd(b);
    const double smin = svd.singularValues().minCoeff();
    if (!(smin > 1e-12 * std::max(1.0, svd.singularValues().maxCoeff()))) {
      throw SingularMatrixError("quasilinear: B(u) singular at u=" + format_vector(u) +
                                    " (smallest singular value " + format_double(smin) + ")",
                                smin);
    }
  }

  RelaxationSystem sys;
  sys.name = "quasilinear";
  sys.k = k;
  sys.m = k * d;
  sys.d = d;
  sys.constant_coefficients = true;
  sys.transport = [k, d](const Point&, int axis) {
    const Matrix e = selector(k, d, axis);
    return TransportBlocks{Matrix(), e, e.transpose(), Matrix::Zero(k * d, k * d)};
  };
  auto mob = target.mobility;
  sys.source = [mob](const Point&, const Vector& u, const Vector& z) {
    return Vector(-mob(u).partialPivLu().solve(z));
  };
  sys.source_jacobian = [mob](const Point&, const Vector& u, const Vector&) {
    return Matrix(-mob(u).inverse());
  };
  sys.source_linear = true;
  if (target.flux) {
    auto flux = target.flux;
    sys.lower_nonconserved = [mob, flux](const Point&, const Vector& u, const Vector&) {
      return Vector(mob(u).partialPivLu().solve(flux(u)));
    };
  }
  if (target.source) {
    auto g = target.source;
    sys.conserved_source = [g](const Point&, const Vector& u) { return g(u); };
  }
  return sys;
}

RelaxationSystem from_sqrt_symbol(const ReactionDiffusion& target, const SpatialGrid& grid) {
  const int k = target.k, d = target.d;
  if (!target.constant_coefficients)
    throw PreconditionError("sqrt-symbol: only constant coefficients are supported");
  if (grid.dim() != d) throw DimensionError("sqrt-symbol: grid dimension does not match target");
  const Matrix a = target.diffusion(Point::Zero(d));
  if (a.rows() != k * d || a.cols() != k * d) throw DimensionError("sqrt-symbol: A must be kd x kd");

  auto symbol = [a, k, d](const Point& xi) {
    Matrix s = Matrix::Zero(k, k);
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l) s += xi[j] * xi[l] * block_of(a, k, j, l);
    return s;
  };

  const FourierGrid fourier(grid);
  for (int mode = 1; mode < fourier.size(); ++mode) {
    const Point xi = fourier.wavenumber(mode);
    const Matrix s = symbol(xi);
    const double asym = (s - s.transpose()).norm();
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_part(s), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (asym > 1e-12 * std::max(1.0, s.norm()) || !(lmin > 0.0)) {
      throw SingularMatrixError("sqrt-symbol: S(xi) not symmetric positive definite at mode " +
                                    std::to_string(mode) + " (xi=" + format_vector(xi) +
                                    ", smallest eigenvalue " + format_double(lmin) + ")",
                                lmin);
    }
  }

  RelaxationSystem sys;
  sys.name = "sqrt-symbol";
  sys.k = k;
  sys.m = k;
  sys.d = d;
  sys.constant_coefficients = true;
  sys.multiplier = [symbol](const Point& xi) { return sqrt_spd(symbol(xi)); };
  sys.source = [](const Point&, const Vector&, const Vector& z) { return Vector(-z); };
  sys.source_jacobian = [k](const Point&, const Vector&, const Vector&) {
    return Matrix(-Matrix::Identity(k, k));
  };
  sys.source_linear = true;
  sys.source_jacobian_constant = true;
  if (target.reaction) {
    auto f = target.reaction;
    sys.conserved_source = [f](const Point&, const Vector& u) { return f(u); };
  }
  return sys;
}

CarlemanModel carleman() {
  CarlemanModel model;
  RawSystem& raw = model.raw;
  raw.name = "carleman-raw";
  raw.n = 2;
  raw.d = 1;
  raw.coefficients = [](const Point&, int) {
    Matrix a(2, 2);
    a << 1.0, 0.0, 0.0, -1.0;
    return a;
  };
  raw.source = [](const Point&, const Vector& w) {
    const double q = w[1] * w[1] - w[0] * w[0];
    Vector b(2);
    b << q, -q;
    return b;
  };
  raw.source_jacobian = [](const Point&, const Vector& w) {
    Matrix j(2, 2);
    j << -2.0 * w[0], 2.0 * w[1], 2.0 * w[0], -2.0 * w[1];
    return j;
  };
  raw.source_rank = 1;
  raw.constant_coefficients = true;
  raw.probe_box = StateBox::uniform(2, 0.1, 1.0);

  model.transform.p.resize(2, 2);
  model.transform.p << 1.0, 1.0, 1.0, -1.0;
  model.transform.k = 1;

  model.system = decouple(raw, model.transform);
  model.system.name = "carleman";
  // Q = -2 rho m is linear in m for frozen rho.
  model.system.source_linear = true;
  model.system.positivity_floor = 1e-8;
  return model;
}

ReactionDiffusion heat_target(int d) {
  ReactionDiffusion t;
  t.k = 1;
  t.d = d;
  t.diffusion = [d](const Point&) { return Matrix(Matrix::Identity(d, d)); };
  return t;
}

ReactionDiffusion anisotropic_target() {
  ReactionDiffusion t;
  t.k = 1;
  t.d = 2;
  t.diffusion = [](const Point&) {
    Matrix a(2, 2);
    a << 2.0, 0.3, 0.3, 1.0;
    return a;
  };
  return t;
}

ReactionDiffusion triangular_target() {
  ReactionDiffusion t;
  t.k = 2;
  t.d = 1;
  t.diffusion = [](const Point&) {
    Matrix a(2, 2);
    a << 1.0, 2.0, 0.0, 1.0;
    return a;
  };
  return t;
}

QuasilinearDivergence bu2_target() {
  QuasilinearDivergence t;
  t.k = 1;
  t.d = 1;
  t.flux = [](const Vector& u) { return Vector(u.array().square() / 2.0); };
  t.mobility = [](const Vector& u) { return Matrix::Constant(1, 1, 1.0 + u[0] * u[0]); };
  t.box = StateBox::uniform(1, -1.0, 1.0);
  return t;
}

QuasilinearDivergence carleman_limit_target() {
  QuasilinearDivergence t;
  t.k = 1;
  t.d = 1;
  t.mobility = [](const Vector& u) { return Matrix::Constant(1, 1, 0.5 / u[0]); };
  t.box = StateBox::uniform(1, 0.5, 1.5);
  return t;
}

std::function<Vector(const Vector&)> logistic_reaction() {
  return [](const Vector& u) { return Vector(u.array() * (1.0 - u.array())); };
}

const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names{"carleman", "heat1d", "heat2d", "aniso2d",
                                              "quasilinear-bu2", "sqrt-heat", "null-limit"};
  return names;
}

Demo make_demo(const std::string& name, const SpatialGrid& grid, bool logistic) {
  auto with_reaction = [logistic](ReactionDiffusion t) {
    if (logistic) t.reaction = logistic_reaction();
    return t;
  };
  auto require_dim = [&](int d) {
    if (grid.dim() != d)
      throw DimensionError("demo " + name + " needs a " + std::to_string(d) + "D grid");
  };
  Demo demo;
  demo.name = name;
  if (logistic && (name == "carleman" || name == "quasilinear-bu2" || name == "null-limit"))
    throw PreconditionError("demo " + name + " has no reaction-term variant");

  if (name == "carleman") {
    require_dim(1);
    demo.system = carleman().system;
    demo.target = carleman_limit_target();
    demo.box = StateBox::uniform(1, 0.5, 1.5);
    demo.mean = 1.0;
    demo.amplitude = 0.5;
  } else if (name == "heat1d" || name == "heat2d" || name == "aniso2d" || name == "sqrt-heat") {
    const int d = name == "heat1d" || name == "sqrt-heat" ? 1 : 2;
    require_dim(d);
    const ReactionDiffusion t = with_reaction(name == "aniso2d" ? anisotropic_target() : heat_target(d));
    demo.system = name == "sqrt-heat" ? from_sqrt_symbol(t, grid) : from_reaction_diffusion(t);
    demo.system.name = name;
    demo.target = t;
    if (logistic) {
      demo.box = StateBox::uniform(1, 0.0, 1.0);
      demo.mean = 0.5;
      demo.amplitude = 0.25;
    } else {
      demo.box = StateBox::uniform(1, -1.0, 1.0);
    }
  } else if (name == "quasilinear-bu2") {
    require_dim(1);
    const QuasilinearDivergence t = bu2_target();
    demo.system = from_quasilinear(t);
    demo.system.name = name;
    demo.target = t;
    demo.box = t.box;
    demo.amplitude = 0.5;
  } else if (name == "null-limit") {
    require_dim(1);
    demo.system = from_reaction_diffusion(heat_target(1));
    demo.system.name = name;
    auto base = demo.system.transport;
    demo.system.transport = [base](const Point& x, int axis) {
      TransportBlocks b = base(x, axis);
      b.m11 = Matrix::Identity(1, 1);
      return b;
    };
    demo.box = StateBox::uniform(1, -1.0, 1.0);
  } else {
    throw PreconditionError("unknown demo '" + name + "'");
  }
  return demo;
}

}  // namespace relax
