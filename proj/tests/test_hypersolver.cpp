#include "fixtures.hpp"

#include "relax/diagnostics.hpp"
#include "relax/parasolver.hpp"

#include <doctest.h>

using namespace relax;
using namespace relax::testing;

namespace {

double mass(const Matrix& u, const SpatialGrid& g) { return u.rowwise().sum()(0) * g.cell_volume(); }

SolverOptions with_flux(FluxScheme f, double cfl = 0.45) {
  SolverOptions o;
  o.flux = f;
  o.cfl = cfl;
  return o;
}

}  // namespace

TEST_CASE("wave speeds of the heat and kinetic systems") {
  const SpatialGrid g(64, 1.0);
  CHECK(max_wave_speed(from_reaction_diffusion(heat_target(1)), g) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(max_wave_speed(carleman().system, g) == doctest::Approx(1.0).epsilon(1e-12));
  const SpatialGrid g2(16, 16, 1.0, 1.0);
  CHECK(max_wave_speed(from_reaction_diffusion(heat_target(2)), g2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("option parsing") {
  CHECK(parse_flux("spectral") == FluxScheme::spectral);
  CHECK(to_string(FluxScheme::upwind) == "upwind");
  CHECK_THROWS_AS(parse_flux("weno"), PreconditionError);
  CHECK(parse_source_solve(to_string(SourceSolve::newton)) == SourceSolve::newton);
  SolverOptions o;
  o.cfl = 1.5;
  CHECK_THROWS_AS(o.validate(), PreconditionError);
}

TEST_CASE("zero and constant states are steady") {
  const SpatialGrid g(32, 1.0);
  const RelaxationSystem heat = from_reaction_diffusion(heat_target(1));
  for (FluxScheme f : {FluxScheme::rusanov, FluxScheme::upwind, FluxScheme::spectral}) {
    HyperbolicStepper stepper(heat, g, with_flux(f));
    const double dt = stepper.time_step_limit(0.1);
    const FieldState zero = FieldState::zeros(heat, g, 0.1);
    const FieldState z1 = stepper.step(zero, dt);
    CHECK(z1.uI.norm() == 0.0);
    CHECK(z1.uII.norm() == 0.0);

    FieldState c = zero;
    c.uI.setConstant(0.7);
    const FieldState c1 = stepper.step(c, dt);
    CHECK((c1.uI.array() - 0.7).abs().maxCoeff() < 1e-15);
    CHECK(c1.uII.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(c1.t == doctest::Approx(dt));
  }
}

TEST_CASE("time step above the stability bound is rejected") {
  const SpatialGrid g(32, 1.0);
  const RelaxationSystem heat = from_reaction_diffusion(heat_target(1));
  HyperbolicStepper stepper(heat, g, SolverOptions{});
  FieldState s = FieldState::zeros(heat, g, 0.1);
  CHECK_THROWS_AS(stepper.step(s, 2 * stepper.time_step_limit(0.1)), SolverError);
  CHECK_THROWS_AS(stepper.step(s, 0.0), PreconditionError);
}

TEST_CASE("spectral transport requires constant coefficients") {
  RelaxationSystem sys = from_reaction_diffusion(heat_target(1));
  sys.constant_coefficients = false;
  CHECK_THROWS_AS(HyperbolicStepper(sys, SpatialGrid(16, 1.0), with_flux(FluxScheme::spectral)),
                  PreconditionError);
}

TEST_CASE("single heat mode decays at the slow relaxation rate") {
  const SpatialGrid g(256, 1.0);
  const RelaxationSystem heat = from_reaction_diffusion(heat_target(1));
  const double eps = 0.05, T = 0.1;
  const Matrix u0 = sine_field(g, 1, 0.0, 1.0);
  const FieldState init = well_prepared(heat, g, u0, eps);
  const double sym = 4 * kPi * kPi;
  // du/dt(0) = -dv/dx = -sym * u for well-prepared data.
  const double oracle = relaxation_mode_amplitude(sym, eps, T, 1.0, -sym);
  double gap_prev = 0.0;
  for (double cfl : {0.45, 0.225}) {
    const Trajectory traj = run(heat, g, init, T, with_flux(FluxScheme::spectral, cfl));
    const FourierGrid f(g);
    const double amp = -2 * f.forward(traj.final_state().uI.row(0).transpose())[1].imag();
    const double gap = std::abs(amp - oracle);
    CHECK(gap < 2e-3);
    if (gap_prev > 0) CHECK(gap < 0.6 * gap_prev);
    gap_prev = gap;
  }
}

TEST_CASE("mass is conserved by source-free runs") {
  const SpatialGrid g(64, 1.0);
  const Matrix u0 = sine_field(g, 1, 1.0, 0.5);
  for (FluxScheme f : {FluxScheme::rusanov, FluxScheme::upwind, FluxScheme::spectral}) {
    for (const char* name : {"heat1d", "carleman"}) {
      const Demo demo = make_demo(name, g);
      const Trajectory traj = run(demo.system, g, well_prepared(demo.system, g, u0, 0.1), 0.02, with_flux(f));
      const double m0 = mass(u0, g);
      CHECK(std::abs(mass(traj.final_state().uI, g) - m0) <= 1e-12 * std::abs(m0));
    }
  }
}

TEST_CASE("energy does not grow without sources") {
  const SpatialGrid g(64, 1.0);
  const RelaxationSystem heat = from_reaction_diffusion(heat_target(1));
  const Trajectory traj = run(heat, g, well_prepared(heat, g, sine_field(g, 1, 0.0, 1.0), 0.1), 0.05, SolverOptions{});
  for (std::size_t i = 1; i < traj.steps.size(); ++i) {
    CHECK(traj.steps[i].energy <= traj.steps[i - 1].energy * (1 + 1e-10));
  }
  CHECK(traj.steps.front().dt == 0.0);
  CHECK(traj.steps.back().t == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("newton and closed-form source solves agree on a linear source") {
  const SpatialGrid g(64, 1.0);
  const CarlemanModel model = carleman();
  const Matrix u0 = sine_field(g, 1, 1.0, 0.5);
  const FieldState init = well_prepared(model.system, g, u0, 0.1);
  SolverOptions lin, newton;
  lin.source_solve = SourceSolve::linear;
  newton.source_solve = SourceSolve::newton;
  const Trajectory a = run(model.system, g, init, 0.02, lin);
  const Trajectory b = run(model.system, g, init, 0.02, newton);
  CHECK((a.final_state().uI - b.final_state().uI).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.final_state().uII - b.final_state().uII).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("snapshots land on multiples of the stride") {
  const SpatialGrid g(32, 1.0);
  const RelaxationSystem heat = from_reaction_diffusion(heat_target(1));
  SolverOptions o;
  o.snapshot_stride = 0.01;
  const Trajectory traj = run(heat, g, FieldState::zeros(heat, g, 0.1), 0.035, o);
  REQUIRE(traj.snapshots.size() == 5);
  CHECK(traj.snapshots[1].t == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(traj.snapshots[3].t == doctest::Approx(0.03).epsilon(1e-14));
  CHECK(traj.snapshots[4].t == doctest::Approx(0.035).epsilon(1e-14));

  const Trajectory empty = run(heat, g, FieldState::zeros(heat, g, 0.1), 0.0, o);
  CHECK(empty.snapshots.size() == 1);
  CHECK(empty.steps.size() == 1);
}

TEST_CASE("non-positive initial density is rejected") {
  const SpatialGrid g(32, 1.0);
  const RelaxationSystem carl = carleman().system;
  FieldState s = FieldState::zeros(carl, g, 0.1);
  s.uI = sine_field(g, 1, 0.0, 1.0);
  CHECK_THROWS_AS(run(carl, g, s, 0.01, SolverOptions{}), PreconditionError);
}

TEST_CASE("well-prepared data has zero limit residual") {
  const SpatialGrid g(64, 1.0);
  for (const char* name : {"heat1d", "carleman", "quasilinear-bu2"}) {
    const Demo demo = make_demo(name, g);
    const FieldState s = well_prepared(demo.system, g, sine_field(g, 1, demo.mean, demo.amplitude), 0.1);
    CHECK(limit_residual(s, demo.system, g) <= 1e-10);
  }
}
