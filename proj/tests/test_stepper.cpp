#include <cmath>
#include <filesystem>
#include <fstream>

#include "benard/initial.hpp"
#include "benard/ledger.hpp"
#include "benard/oracles.hpp"
#include "benard/stepper.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

const ViscosityLaw kLaw = ViscosityLaw::affine(1.0, 1.0, 1.0);

FluidState coupled_state(const Grid& g, double u_amp = 0.5) {
  FluidState s = FluidState::at_rest(g, 0.0);
  s.rho = density_blob(g, {0.5, 0.5, 0.0}, 0.15, 1.0, 0.05, 0.02);
  s.u = cellular_velocity(g, u_amp);
  s.theta = temperature_modes(g, 1.0, 2, 7);
  return s;
}

double kinetic(const FluidState& s) {
  double e = 0.0;
  for (int a = 0; a < s.grid().dim(); ++a)
    e += (face_average(s.rho, a) * s.u.component(a).square()).sum();
  return e * s.grid().cell_volume();
}

bool walls_hold(const FluidState& s) {
  if (s.theta.boundary() != BoundaryKind::DirichletZero) return false;
  VectorField pinned = s.u;
  pinned.enforce_no_slip();
  for (int a = 0; a < s.grid().dim(); ++a)
    if (!(pinned.component(a) == s.u.component(a)).all()) return false;
  return true;
}

}  // namespace

TEST_CASE("stable_dt") {
  const Grid g = unit_square(4);
  StepConfig cfg;
  cfg.dt_max = 1.0;
  FluidState s = FluidState::at_rest(g, 1.0);
  CHECK(stable_dt(s, cfg) == 1.0);
  s.u.component(0)[6] = -1.0;
  CHECK(stable_dt(s, cfg) == 0.125);
  cfg.dt_max = 0.1;
  CHECK(stable_dt(s, cfg) == 0.1);
}

TEST_CASE("projection leaves solenoidal fields alone") {
  const Grid g = unit_square(24);
  const VectorField u = cellular_velocity(g, 1.0);
  const ScalarField rho = density_blob(g, {0.4, 0.5, 0.0}, 0.2, 1.0, 0.1, 0.03);
  const ProjectionResult p = project(u, rho, 0.01, StepConfig{});
  for (int a = 0; a < 2; ++a) CHECK((p.u.component(a) - u.component(a)).abs().maxCoeff() < 1e-13);
  CHECK(lp_norm(p.phi, INFINITY) < 1e-12);
}

TEST_CASE("projection removes discrete gradients") {
  const Grid g = unit_square(32);
  const ScalarField psi = cells(g, [](double x, double y) { return std::cos(pi * x) * std::cos(2 * pi * y) + x * x * (1 - x); });
  VectorField u_star = gradient(psi);
  u_star.set_boundary(VelocityBoundary::NoSlip);
  u_star.enforce_no_slip();
  StepConfig cfg;
  cfg.projection_tol = 1e-10;
  const ProjectionResult p = project(u_star, cells(g, [](double, double) { return 1.0; }), 0.02, cfg);
  CHECK(lp_norm(p.u, 2.0) <= 10 * cfg.projection_tol * lp_norm(u_star, 2.0));
  // phi recovers psi / dt up to a constant.
  ScalarField expect = psi;
  expect.values() = psi.values() / 0.02;
  expect.values() -= expect.values().mean();
  CHECK((p.phi.values() - expect.values()).abs().maxCoeff() < 1e-6 * expect.values().abs().maxCoeff());
}

TEST_CASE("projection with a vacuum patch") {
  const Grid g = unit_square(32);
  ScalarField rho = density_blob(g, {0.5, 0.5, 0.0}, 0.2, 1.0, 0.05, 0.02);
  detail::for_each_sample(g.cell_extents(), [&](const std::array<int, 3>& c, Index idx) {
    if (std::hypot(rho.center(0, c[0]) - 0.25, rho.center(1, c[1]) - 0.25) < 0.1) rho.values()[idx] = 0.0;
  });
  REQUIRE(rho.values().minCoeff() == 0.0);
  VectorField u_star = cellular_velocity(g, 1.0);
  u_star.component(0) += 0.3 * face_average(rho, 0);
  u_star.enforce_no_slip();
  StepConfig cfg;
  const ProjectionResult p = project(u_star, rho, 0.01, cfg);
  CHECK(p.u.component(0).allFinite());
  CHECK(p.div_residual <= 10 * cfg.projection_tol * discrete_l2(Eigen::VectorXd(divergence(u_star).values().matrix()), g.cell_volume()));
}

TEST_CASE("the rest state is a fixed point") {
  const Grid g = unit_square(16);
  const Stepper stepper(g, kLaw, 1.0, StepConfig{});
  FluidState s = FluidState::at_rest(g, 1.0);
  for (int n = 0; n < 5; ++n) s = stepper.step(s, 0.01).first;
  CHECK(lp_norm(s.u, INFINITY) == 0.0);
  CHECK(lp_norm(s.theta, INFINITY) == 0.0);
  CHECK((s.rho.values() == 1.0).all());
  CHECK(s.t == doctest::Approx(0.05));
}

TEST_CASE("heat decay oracle") {
  const HeatOracle h = heat_oracle(64, 1.0, 5e-4, 1.5, 1.0);
  CHECK(h.expected == doctest::Approx(4 * pi * pi));
  CHECK(h.rel_error <= 0.02);
}

TEST_CASE("kinetic energy never grows without forcing") {
  const Grid g = unit_square(24);
  StepConfig cfg;
  cfg.buoyancy = false;
  cfg.heat_source = false;
  const Stepper stepper(g, kLaw, 1.0, cfg);
  FluidState s = FluidState::at_rest(g, 0.8);
  s.u = cellular_velocity(g, 1.0);
  double prev = kinetic(s);
  for (int n = 0; n < 20; ++n) {
    s = stepper.step(s, stable_dt(s, cfg)).first;
    const double e = kinetic(s);
    CHECK(e <= prev * (1 + 1e-12));
    prev = e;
  }
}

TEST_CASE("per-step invariants of a coupled run") {
  const Grid g = unit_square(24);
  StepConfig cfg;
  const Stepper stepper(g, kLaw, 1.0, cfg);
  FluidState s = coupled_state(g);
  const double m0 = s.rho.values().sum();
  const double lo = s.rho.values().minCoeff(), hi = s.rho.values().maxCoeff();
  for (int n = 0; n < 15; ++n) {
    auto [next, report] = stepper.step(s, stable_dt(s, cfg));
    s = std::move(next);
    CHECK(report.div_residual <= 1e-9);
    CHECK(lp_norm(divergence(s.u), 2.0) <= 1e-9);
    CHECK(std::abs(s.rho.values().sum() - m0) <= 1e-12 * m0);
    CHECK(s.rho.values().minCoeff() >= lo - 1e-10);
    CHECK(s.rho.values().maxCoeff() <= hi + 1e-10);
    CHECK(walls_hold(s));
    CHECK(std::abs(s.P.values().mean()) < 1e-12);
  }
}

TEST_CASE("step doubling from a buoyancy-driven start") {
  const Grid g = unit_square(16);
  StepConfig cfg;
  cfg.step_doubling_tol = 1e-3;
  cfg.dt_max = 0.05;
  const Stepper stepper(g, kLaw, 1.0, cfg);
  FluidState s = FluidState::at_rest(g, 1.0);
  s.theta = temperature_modes(g, 50.0, 2, 3);
  REQUIRE(stable_dt(s, cfg) == cfg.dt_max);
  const auto [next, report] = stepper.controlled_step(s, stable_dt(s, cfg));
  CHECK(report.doubling_error <= 10 * cfg.step_doubling_tol);
  CHECK(report.halvings > 0);
  CHECK(next.t == doctest::Approx(cfg.dt_max / std::pow(2.0, report.halvings)));

  cfg.step_doubling_tol = 0.0;
  const auto plain = Stepper(g, kLaw, 1.0, cfg).controlled_step(s, 0.05);
  CHECK(plain.second.halvings == 0);
  CHECK(plain.first.t == 0.05);
}

TEST_CASE("stage failures and bad input") {
  const Grid g = unit_square(8);
  CHECK_THROWS_AS(Stepper(g, kLaw, 0.0, StepConfig{}), ConfigError);
  const Stepper stepper(g, kLaw, 1.0, StepConfig{});
  CHECK_THROWS_AS(stepper.step(FluidState::at_rest(g, 1.0), 0.0), DomainError);
  StepConfig hard;
  hard.cfl = 100.0;
  hard.dt_max = 10.0;
  const FluidState s = coupled_state(g, 5.0);
  CHECK_THROWS_AS(Stepper(g, kLaw, 1.0, hard).step(s, stable_dt(s, hard)), StabilityError);
}

TEST_CASE("checkpoint round trip") {
  const Grid g = unit_square(12);
  FluidState s = coupled_state(g);
  s.t = 0.375;
  s.P = cells(g, [](double x, double y) { return x - y; });
  const auto dir = std::filesystem::temp_directory_path() / "benard_ckpt_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "state.bin";
  write_checkpoint(s, path);
  const FluidState r = read_checkpoint(path);
  CHECK(r.t == s.t);
  CHECK(r.grid() == g);
  CHECK((r.rho.values() == s.rho.values()).all());
  CHECK((r.theta.values() == s.theta.values()).all());
  CHECK((r.P.values() == s.P.values()).all());
  for (int a = 0; a < 2; ++a) CHECK((r.u.component(a) == s.u.component(a)).all());
  CHECK(r.theta.boundary() == BoundaryKind::DirichletZero);

  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 8);
  CHECK_THROWS_AS(read_checkpoint(path), IoError);
  {
    std::ofstream f(path, std::ios::binary | std::ios::app);
    f << "0123456789abcdef";
  }
  CHECK_THROWS_AS(read_checkpoint(path), IoError);
  CHECK_THROWS_AS(read_checkpoint(dir / "missing.bin"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("three-dimensional coupled steps") {
  const Grid g = build_grid({3, {10, 10, 10}, {1.0, 1.0, 1.0}});
  StepConfig cfg;
  const Stepper stepper(g, kLaw, 1.0, cfg);
  FluidState s = FluidState::at_rest(g, 0.0);
  s.rho = density_blob(g, {0.5, 0.5, 0.5}, 0.25, 1.0, 0.05, 0.03);
  s.u = cellular_velocity(g, 0.5);
  s.theta = temperature_modes(g, 1.0, 2, 4);
  const double m0 = s.rho.values().sum();
  for (int n = 0; n < 5; ++n) {
    auto [next, report] = stepper.step(s, stable_dt(s, cfg));
    s = std::move(next);
    CHECK(report.div_residual <= 1e-9);
    CHECK(std::abs(s.rho.values().sum() - m0) <= 1e-12 * m0);
    CHECK(walls_hold(s));
  }
  CHECK(lp_norm(s.u, 2.0) > 0.0);
}
