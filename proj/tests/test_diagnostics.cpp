#include "fixtures.hpp"

#include "relax/diagnostics.hpp"

#include <doctest.h>

#include <atomic>

using namespace relax;
using namespace relax::testing;

TEST_CASE("energy examples") {
  const SpatialGrid g(256, 1.0);
  const RelaxationSystem heat = from_reaction_diffusion(heat_target(1));
  FieldState s = FieldState::zeros(heat, g, 0.1);
  CHECK(energy(s, g) == 0.0);
  s.uI = sine_field(g, 1, 0.0, 1.0);
  CHECK(std::abs(energy(s, g) - 0.5) <= 1e-12);
  s.uI.setZero();
  s.uII.setOnes();
  CHECK(energy(s, g) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("energy is invariant under periodic translation") {
  const SpatialGrid g(64, 1.0);
  const RelaxationSystem heat = from_reaction_diffusion(heat_target(1));
  FieldState s = FieldState::zeros(heat, g, 0.2);
  for (int c = 0; c < 64; ++c) {
    s.uI(0, c) = std::exp(std::sin(2 * kPi * g.point(c)[0]));
    s.uII(0, c) = std::cos(6 * kPi * g.point(c)[0]) + 0.1 * c;
  }
  FieldState shifted = s;
  for (int c = 0; c < 64; ++c) {
    shifted.uI(0, c) = s.uI(0, (c + 5) % 64);
    shifted.uII(0, c) = s.uII(0, (c + 5) % 64);
  }
  CHECK(energy(shifted, g) == doctest::Approx(energy(s, g)).epsilon(1e-14));
}

TEST_CASE("energy inequality for source-free and logistic runs") {
  const SpatialGrid g(128, 1.0);
  const RelaxationSystem heat = from_reaction_diffusion(heat_target(1));
  const double lambda0 = check_dissipativity(heat, samples_1d()).margin;

  const Trajectory zero = run(heat, g, FieldState::zeros(heat, g, 0.1), 0.01, SolverOptions{});
  const EnergyCheck z = energy_inequality_check(zero, lambda0, true);
  CHECK(z.passed);
  CHECK(z.growth_rate == 0.0);

  const Trajectory traj = run(heat, g, well_prepared(heat, g, sine_field(g, 1, 0.0, 1.0), 0.1), 0.05, SolverOptions{});
  const EnergyCheck e = energy_inequality_check(traj, lambda0, true);
  CHECK(e.passed);
  CHECK(e.growth_rate == 0.0);
  CHECK(e.per_step_nonincreasing);
  CHECK(e.worst_step_ratio <= 1 + 1e-10);
  CHECK(e.dissipation <= e.dissipation_bound);

  const Demo logistic = make_demo("heat1d", g, true);
  const Matrix u0 = sine_field(g, 1, logistic.mean, logistic.amplitude);
  const Trajectory lt = run(logistic.system, g, well_prepared(logistic.system, g, u0, 0.1), 0.1, SolverOptions{});
  const EnergyCheck l = energy_inequality_check(lt, lambda0, false);
  CHECK(l.passed);
  CHECK(l.growth_rate <= 2.0);
}

TEST_CASE("limit residual vanishes for zero and well-prepared states") {
  const SpatialGrid g(64, 1.0);
  const RelaxationSystem heat = from_reaction_diffusion(heat_target(1));
  CHECK(limit_residual(FieldState::zeros(heat, g, 0.1), heat, g) == 0.0);
  const FieldState wp = well_prepared(heat, g, sine_field(g, 1, 0.0, 1.0), 0.1);
  CHECK(limit_residual(wp, heat, g) <= 1e-10);
  FieldState off = wp;
  off.uII.setZero();
  // Residual is d_x u = 2 pi cos(2 pi x); H^-1 weight 1/(1 + 4 pi^2) on both modes.
  const double expect = std::sqrt(4 * kPi * kPi * 0.5 / (1 + 4 * kPi * kPi));
  CHECK(limit_residual(off, heat, g) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("observed order and space-time error") {
  CHECK(observed_order(0.04, 0.01, 0.2, 0.1) == doctest::Approx(2.0));
  const SpatialGrid g(8, 1.0);
  const std::vector<double> times{0.0, 0.5, 1.0};
  const std::vector<Matrix> a(3, Matrix::Zero(1, 8));
  std::vector<Matrix> b(3, Matrix::Ones(1, 8));
  // Trapezoid of a constant unit error over [0, 1].
  CHECK(spacetime_error(times, a, b, g) == doctest::Approx(1.0));
  b.pop_back();
  CHECK_THROWS_AS(spacetime_error(times, a, b, g), DimensionError);
}

TEST_CASE("parallel_for visits every index and propagates errors") {
  std::atomic<int> sum{0};
  parallel_for(10, 4, [&](int i) { sum += i; });
  CHECK(sum == 45);
  CHECK_THROWS_AS(parallel_for(4, 2, [](int i) {
                    if (i == 3) throw SolverError("boom");
                  }),
                  SolverError);
}

TEST_CASE("convergence study preconditions") {
  const SpatialGrid g(32, 1.0);
  LadderSetup s;
  s.system = from_reaction_diffusion(heat_target(1));
  s.reference = ParabolicTarget(heat_target(1));
  s.initial_uI = sine_field(g, 1, 0.0, 1.0);
  s.T = 0.01;
  s.epsilons = {0.1};
  CHECK_THROWS_AS(convergence_study(s, g), PreconditionError);
  s.epsilons = {0.1, 0.2, 0.05};
  CHECK_THROWS_AS(convergence_study(s, g), PreconditionError);
}

TEST_CASE("convergence table is independent of the thread count") {
  const SpatialGrid g(32, 1.0);
  LadderSetup s;
  s.system = from_reaction_diffusion(heat_target(1));
  s.reference = ParabolicTarget(heat_target(1));
  s.initial_uI = sine_field(g, 1, 0.0, 1.0);
  s.T = 0.02;
  s.epsilons = {0.2, 0.1, 0.05};
  s.solver.flux = FluxScheme::spectral;
  s.solver.cfl = 0.1;
  const ConvergenceTable one = convergence_study(s, g);
  s.threads = 3;
  const ConvergenceTable three = convergence_study(s, g);
  REQUIRE(one.rows.size() == 3);
  CHECK(std::isnan(one.rows[0].observed_order));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(one.rows[i].eps == three.rows[i].eps);
    CHECK(one.rows[i].errI == three.rows[i].errI);
    CHECK(one.rows[i].errII_weak == three.rows[i].errII_weak);
  }
  CHECK(one.errI_strictly_decreasing());
}
