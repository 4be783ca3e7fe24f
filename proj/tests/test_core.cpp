#include "fixtures.hpp"

#include "relax/fourier.hpp"
#include "relax/symbol.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace relax;
using namespace relax::testing;

TEST_CASE("grid rejects degenerate sizes and wraps indices") {
  CHECK_THROWS_AS(SpatialGrid(3, 1.0), PreconditionError);
  CHECK_THROWS_AS(SpatialGrid(8, 0.0), PreconditionError);
  CHECK_THROWS_AS(SpatialGrid(8, 4, 1.0, -1.0), PreconditionError);

  const SpatialGrid g(8, 2.0);
  CHECK(g.spacing(0) == doctest::Approx(0.25));
  CHECK(g.neighbour(0, 0, -1) == 7);
  CHECK(g.neighbour(7, 0, 1) == 0);
  CHECK(g.point(3)[0] == doctest::Approx(0.75));

  const SpatialGrid g2(4, 8, 1.0, 2.0);
  CHECK(g2.size() == 32);
  CHECK(g2.index(1, 2) == 9);
  CHECK(g2.neighbour(g2.index(0, 7), 1, 1) == g2.index(0, 0));
  CHECK(g2.cell_volume() == doctest::Approx(0.25 * 0.25));
}

TEST_CASE("fourier transform normalisation and spectral derivative") {
  const SpatialGrid g(32, 1.0);
  const FourierGrid f(g);
  Vector s(32), c(32);
  for (int i = 0; i < 32; ++i) {
    s[i] = std::sin(2 * kPi * g.point(i)[0]);
    c[i] = std::cos(2 * kPi * g.point(i)[0]);
  }
  const CVector coeffs = f.forward(s);
  CHECK(std::abs(coeffs[1] - Complex(0, -0.5)) < 1e-14);
  CHECK(std::abs(coeffs[31] - Complex(0, 0.5)) < 1e-14);
  CHECK((f.inverse(coeffs) - s).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((f.derivative(s, 0) - 2 * kPi * c).cwiseAbs().maxCoeff() < 1e-11);
  // |c_1|^2 + |c_-1|^2 = 1/2, weighted by 1/(1 + 4 pi^2).
  CHECK(f.hminus1_norm_squared(s) == doctest::Approx(0.5 / (1 + 4 * kPi * kPi)).epsilon(1e-12));
}

TEST_CASE("fourier derivative in 2D acts per axis") {
  const SpatialGrid g(16, 8, 1.0, 2.0);
  const FourierGrid f(g);
  Vector u(g.size()), dy(g.size());
  for (int c = 0; c < g.size(); ++c) {
    const Point x = g.point(c);
    u[c] = std::sin(2 * kPi * x[0]) * std::cos(kPi * x[1]);
    dy[c] = -kPi * std::sin(2 * kPi * x[0]) * std::sin(kPi * x[1]);
  }
  CHECK((f.derivative(u, 1) - dy).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("principal symbol of the Carleman system") {
  const RelaxationSystem sys = carleman().system;
  const CMatrix s = principal_symbol(sys, pt(0.0), pt(1.0));
  CHECK(std::abs(s(0, 0)) < 1e-15);
  CHECK(std::abs(s(0, 1) - Complex(0, -1)) < 1e-15);
  CHECK(std::abs(s(1, 0) - Complex(0, -1)) < 1e-15);
  const CMatrix a = Complex(0, 1) * s;
  Eigen::ComplexEigenSolver<CMatrix> es(a);
  std::vector<double> ev{es.eigenvalues()[0].real(), es.eigenvalues()[1].real()};
  std::sort(ev.begin(), ev.end());
  CHECK(ev[0] == doctest::Approx(-1.0));
  CHECK(ev[1] == doctest::Approx(1.0));
}

TEST_CASE("principal symbol vanishes at zero wave-vector and is linear in xi") {
  const RelaxationSystem heat2 = from_reaction_diffusion(anisotropic_target());
  CHECK(principal_symbol(heat2, pt(0, 0), pt(0, 0)).norm() == 0.0);
  const Point xi = pt(0.3, -0.7);
  const CMatrix lhs = principal_symbol(heat2, pt(0.1, 0.2), 2.5 * xi);
  const CMatrix rhs = 2.5 * principal_symbol(heat2, pt(0.1, 0.2), xi);
  CHECK((lhs - rhs).norm() < 1e-14);
}

TEST_CASE("principal symbol of the square-root system at xi = 2 pi") {
  const RelaxationSystem sys = from_sqrt_symbol(heat_target(1), SpatialGrid(64, 1.0));
  const CMatrix s = principal_symbol(sys, pt(0.0), pt(2 * kPi));
  CHECK(std::abs(s(0, 1) - 2 * kPi) < 1e-12);
  CHECK(std::abs(s(1, 0) + 2 * kPi) < 1e-12);
  CHECK(std::abs(s(0, 0)) == 0.0);
}

TEST_CASE("principal symbol rejects mismatched wave-vectors") {
  const RelaxationSystem sys = from_reaction_diffusion(heat_target(1));
  CHECK_THROWS_AS(principal_symbol(sys, pt(0.0), pt(1.0, 0.0)), DimensionError);
}

TEST_CASE("limit generator examples") {
  const RelaxationSystem heat = from_reaction_diffusion(heat_target(1));
  CHECK(limit_generator(heat, pt(0.0), vec(0.0), pt(2 * kPi))(0, 0) ==
        doctest::Approx(-4 * kPi * kPi).epsilon(1e-14));
  CHECK(limit_generator(heat, pt(0.0), vec(0.0), pt(0.0)).norm() == 0.0);

  const RelaxationSystem carl = carleman().system;
  for (double rho : {0.5, 0.75, 1.5}) {
    for (double xi : {1.0, -3.0}) {
      CHECK(limit_generator(carl, pt(0.0), vec(rho), pt(xi))(0, 0) ==
            doctest::Approx(-xi * xi / (2 * rho)).epsilon(1e-14));
    }
  }
}

TEST_CASE("limit generator reports a singular stiff Jacobian") {
  RelaxationSystem sys = scalar_system(0, 1, 1, 0);
  sys.source_jacobian = [](const Point&, const Vector&, const Vector&) { return Matrix(Matrix::Zero(1, 1)); };
  try {
    limit_generator(sys, pt(0.0), vec(0.0), pt(1.0));
    FAIL("expected SingularMatrixError");
  } catch (const SingularMatrixError& e) {
    CHECK(e.smallest() == 0.0);
  }
}

TEST_CASE("stiff jacobian examples") {
  const RelaxationSystem heat = from_reaction_diffusion(heat_target(2));
  CHECK((stiff_jacobian(heat, pt(0, 0), vec(0.3), Vector::Constant(2, 0.4)) + Matrix::Identity(2, 2)).norm() == 0.0);

  const RelaxationSystem carl = carleman().system;
  CHECK(stiff_jacobian(carl, pt(0.0), vec(0.75), vec(0.0))(0, 0) == doctest::Approx(-1.5).epsilon(1e-14));
  // Linear Q: the Jacobian does not depend on v.
  CHECK(stiff_jacobian(carl, pt(0.0), vec(0.75), vec(0.3))(0, 0) == doctest::Approx(-1.5).epsilon(1e-14));
}

TEST_CASE("stiff jacobian agrees with a central difference of Q") {
  const RelaxationSystem bu2 = from_quasilinear(bu2_target());
  const RelaxationSystem carl = carleman().system;
  const double step = 1e-5;
  for (const RelaxationSystem* sys : {&bu2, &carl}) {
    for (double u : {0.6, 0.9, 1.3}) {
      for (double z : {-0.4, 0.0, 0.5}) {
        const double fd = (sys->source(pt(0.0), vec(u), vec(z + step))[0] -
                           sys->source(pt(0.0), vec(u), vec(z - step))[0]) /
                          (2 * step);
        const double exact = stiff_jacobian(*sys, pt(0.0), vec(u), vec(z))(0, 0);
        CHECK(std::abs(fd - exact) <= 1e-6 * std::abs(exact));
      }
    }
  }
}

TEST_CASE("stiff jacobian falls back to finite differences") {
  RelaxationSystem sys = scalar_system(0, 1, 1, 0);
  sys.source_jacobian = nullptr;
  sys.source = [](const Point&, const Vector& u, const Vector& z) { return Vector(-(1 + u[0] * u[0]) * z - z.array().cube().matrix()); };
  const double z = 0.2, u = 0.5;
  CHECK(stiff_jacobian(sys, pt(0.0), vec(u), vec(z))(0, 0) ==
        doctest::Approx(-(1 + u * u) - 3 * z * z).epsilon(1e-8));
}

TEST_CASE("reaction-diffusion generator equals the target symbol") {
  const ReactionDiffusion aniso = anisotropic_target();
  const RelaxationSystem sys = from_reaction_diffusion(aniso);
  const SampleSet s = samples_2d();
  const Matrix a = aniso.diffusion(pt(0, 0));
  for (const auto& x : s.points) {
    for (const auto& xi : s.directions) {
      const double oracle = -(a(0, 0) * xi[0] * xi[0] + (a(0, 1) + a(1, 0)) * xi[0] * xi[1] + a(1, 1) * xi[1] * xi[1]);
      const double g = limit_generator(sys, x, vec(0.0), xi)(0, 0);
      CHECK(std::abs(g - oracle) <= 1e-12 * std::abs(oracle));
      CHECK(std::abs(target_generator(aniso, x, vec(0.0), xi)(0, 0) - oracle) <= 1e-12 * std::abs(oracle));
    }
  }
}

TEST_CASE("field state shape checks") {
  const RelaxationSystem sys = from_reaction_diffusion(heat_target(1));
  const SpatialGrid g(16, 1.0);
  FieldState s = FieldState::zeros(sys, g, 0.1);
  CHECK_NOTHROW(s.check_shape(sys, g));
  s.uII.resize(2, 16);
  CHECK_THROWS_AS(s.check_shape(sys, g), DimensionError);
  s = FieldState::zeros(sys, g, 0.1);
  s.eps = 0.0;
  CHECK_THROWS_AS(s.check_shape(sys, g), PreconditionError);
}

TEST_CASE("number formatting is locale independent and round-trips") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1e-20).find('e') != std::string::npos);
  CHECK(std::stod(format_double(1e-20)) == 1e-20);
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(format_vector(pt(1.0, -2.5)) == "[1 -2.5]");
}
