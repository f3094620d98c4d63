#include <cmath>

#include "benard/initial.hpp"
#include "benard/oracles.hpp"
#include "benard/transport.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

VectorField swirl(const Grid& g, double amplitude = 1.0) { return cellular_velocity(g, amplitude); }

double dt_for(const VectorField& u, double target) {
  return target / outflow_courant(u, 1.0);
}

}  // namespace

TEST_CASE("constant density and zero velocity are fixed points") {
  const Grid g = unit_square(32);
  const VectorField u = swirl(g);
  const ScalarField c = cells(g, [](double, double) { return 0.7; });
  const ScalarField after = advect_density(c, u, dt_for(u, 0.9));
  CHECK((after.values() - 0.7).abs().maxCoeff() < 1e-15);

  const ScalarField blob = density_blob(g, {0.5, 0.5, 0.0}, 0.2, 1.0, 0.05, 0.02);
  CHECK((advect_density(blob, VectorField(g), 0.1).values() == blob.values()).all());
}

TEST_CASE("outflow Courant above one is rejected") {
  const Grid g = unit_square(16);
  const VectorField u = swirl(g);
  const ScalarField rho = cells(g, [](double, double) { return 1.0; });
  CHECK_THROWS_AS(advect_density(rho, u, dt_for(u, 1.2)), StabilityError);
  CHECK_THROWS_AS(advect_density(rho, u, dt_for(u, 0.7), AdvectionScheme::Muscl), StabilityError);
}

TEST_CASE("rigid rotation oracle: conservation, max principle, convergence") {
  const RotationOracle r64 = rotation_oracle(64, 0.5, 1.0);
  CHECK(r64.mass_drift <= 1e-12);
  CHECK(r64.rho_min >= r64.rho0_min - 1e-10);
  CHECK(r64.rho_max <= r64.rho0_max + 1e-10);

  // One full turn returns the blob to its start; the upwind error shrinks
  // under refinement.
  const RotationOracle r32 = rotation_oracle(32, 0.5, 1.0);
  CHECK(r64.shape_l1_error < r32.shape_l1_error);
  CHECK(r64.centroid_error < r32.centroid_error);
  CHECK(r64.centroid_error < 0.1);

  const RotationOracle m64 = rotation_oracle(64, 0.25, 1.0, AdvectionScheme::Muscl);
  CHECK(m64.mass_drift <= 1e-12);
  CHECK(m64.rho_min >= m64.rho0_min - 1e-6);
  CHECK(m64.rho_max <= m64.rho0_max + 1e-6);
  CHECK(m64.shape_l1_error < r64.shape_l1_error);
}

TEST_CASE("higher Lebesgue norms only decrease under upwind transport") {
  const Grid g = unit_square(48);
  const VectorField u = swirl(g, 2.0);
  ScalarField rho = density_blob(g, {0.3, 0.6, 0.0}, 0.12, 1.0, 0.01, 0.02);
  const MassMoments m0 = mass_moments(rho);
  const double dt = dt_for(u, 0.8);
  MassMoments prev = m0;
  for (int n = 0; n < 60; ++n) {
    rho = advect_density(rho, u, dt);
    const MassMoments m = mass_moments(rho);
    CHECK(std::abs(m.m0 - m0.m0) <= 1e-12 * m0.m0);
    CHECK(m.rho_min >= m0.rho_min - 1e-10);
    CHECK(m.rho_max <= m0.rho_max + 1e-10);
    for (double p : {1.5, 3.0}) CHECK(m.lp.at(p) <= prev.lp.at(p) * (1 + 1e-14));
    prev = m;
  }
}

TEST_CASE("viscosity laws") {
  const Grid g = unit_square(8);
  const ViscosityLaw affine = ViscosityLaw::affine(1.0, 1.0, 1.0);
  CHECK(affine.mu_min() == 1.0);
  CHECK(affine(0.0) == 1.0);
  CHECK((viscosity_field(ScalarField(g), affine).values() == 1.0).all());
  const ScalarField c = cells(g, [](double, double) { return 0.3; });
  CHECK((viscosity_field(c, ViscosityLaw::affine(2.0, 0.5, 1.0)).values() - 2.15).abs().maxCoeff() < 1e-15);

  // A table dipping under its declared lower bound.
  CHECK_THROWS_AS(ViscosityLaw::tabulated({1.0, 0.4, 1.2}, 1.0, 0.5), ViscosityBoundError);
  CHECK_THROWS_AS(ViscosityLaw::affine(0.0, 1.0, 1.0), ViscosityBoundError);

  const ViscosityLaw table = ViscosityLaw::tabulated({1.0, 1.5, 3.0, 3.2}, 1.0);
  CHECK(table(0.0) == 1.0);
  CHECK(table(1.0) == 3.2);
  CHECK(table(2.0) == 3.2);
  for (double r = 0.0; r < 1.0; r += 0.01) CHECK(table(r + 0.01) >= table(r));

  ScalarField neg = c;
  neg.values()[3] = -0.1;
  CHECK_THROWS_AS(viscosity_field(neg, affine), PositivityError);
}

TEST_CASE("grad mu in L^q") {
  const Grid g = unit_square(32);
  const ViscosityLaw law = ViscosityLaw::affine(1.0, 1.0, 1.0);
  CHECK(grad_mu_lq(cells(g, [](double, double) { return 0.4; }), law, 4.0) == 0.0);
  // mu = 1 + rho with rho = x: grad mu = (1, 0), whose L^4 norm on the unit square is 1.
  CHECK(grad_mu_lq(cells(g, [](double x, double) { return x; }), law, 4.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(grad_mu_lq(ScalarField(g), law, 3.0), DomainError);
}

TEST_CASE("mass moments") {
  const MassMoments one = mass_moments(cells(unit_square(8), [](double, double) { return 1.0; }));
  CHECK(one.m0 == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& [p, v] : one.lp) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(one.rho_min == 1.0);
  CHECK(one.rho_max == 1.0);

  // Sharp disc of radius R and height h: m0 = h pi R^2, ||rho||_{3/2} = h (pi R^2)^(2/3).
  const double R = 0.2, h = 2.0, V = pi * R * R;
  const MassMoments blob = mass_moments(density_blob(unit_square(256), {0.5, 0.5, 0.0}, R, h, 0.0, 0.002));
  CHECK(blob.m0 == doctest::Approx(h * V).epsilon(5e-3));
  CHECK(blob.lp.at(1.5) == doctest::Approx(h * std::pow(V, 2.0 / 3.0)).epsilon(5e-3));
  CHECK(blob.rho_max == doctest::Approx(h).epsilon(1e-6));
}
