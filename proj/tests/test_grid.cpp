#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace testing;

TEST_CASE("build_grid geometry") {
  const Grid g = unit_square(4);
  CHECK(g.spacing(0) == 0.25);
  CHECK(g.spacing(1) == 0.25);
  CHECK(g.diameter() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  const Grid g3 = build_grid({3, {8, 8, 8}, {1.0, 2.0, 1.0}});
  CHECK(g3.diameter() == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
  CHECK(g3.vertical_axis() == 2);
  CHECK(g.vertical_axis() == 1);
}

TEST_CASE("build_grid rejects empty axes and bad lengths") {
  CHECK_THROWS_AS(build_grid({2, {0, 4, 1}, {1.0, 1.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(build_grid({2, {4, 4, 1}, {-1.0, 1.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(build_grid({4, {4, 4, 4}, {1.0, 1.0, 1.0}}), ConfigError);
  try {
    build_grid({2, {0, 4, 1}, {1.0, 1.0, 1.0}});
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("nx") != std::string::npos);
  }
}

TEST_CASE("lp_norm of constants and of sin(pi x)") {
  const Grid g = unit_square(16);
  CHECK(lp_norm(cells(g, [](double, double) { return 1.0; }), 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lp_norm(cells(g, [](double, double) { return 2.0; }), 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(lp_norm(cells(g, [](double, double) { return -3.0; }), INFINITY) == 3.0);
  CHECK_THROWS_AS(lp_norm(cells(g, [](double, double) { return 1.0; }), 0.5), DomainError);

  // Analytic: int_0^1 sin^2(pi x) dx = 1/2. The midpoint error is O(h^2).
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const Grid gn = unit_square(n);
    const double err = std::abs(lp_norm(cells(gn, [](double x, double) { return std::sin(pi * x); }), 2.0) -
                                std::sqrt(0.5));
    CHECK(err < 1.0 / (n * n));
    if (prev > 0.0) CHECK(prev / err > 3.5);
    prev = err;
  }
}

TEST_CASE("lp_norm is homogeneous and monotone") {
  const Grid g = unit_square(24);
  const ScalarField f = cells(g, [](double x, double y) { return std::cos(3 * x) * std::exp(y) - 0.4; });
  for (double p : {1.0, 1.5, 2.0, 3.0, 6.0, double(INFINITY)}) {
    const double base = lp_norm(f, p);
    for (double c : {-7.5, 0.01, 3.0}) {
      ScalarField cf = f;
      cf.values() *= c;
      CHECK(lp_norm(cf, p) == doctest::Approx(std::abs(c) * base).epsilon(4e-16 * 8));
    }
    ScalarField bigger = f;
    bigger.values() = f.values().abs() + 0.1;
    CHECK(lp_norm(bigger, p) >= base);
  }
}

TEST_CASE("gradient is zero on constants and exact on linears") {
  const Grid g = unit_square(8);
  const VectorField g0 = gradient(cells(g, [](double, double) { return 4.2; }));
  CHECK(g0.component(0).abs().maxCoeff() == 0.0);
  CHECK(g0.component(1).abs().maxCoeff() == 0.0);

  const VectorField gx = gradient(cells(g, [](double x, double) { return x; }));
  CHECK((gx.component(0) - 1.0).abs().maxCoeff() < 1e-13);
  CHECK(gx.component(1).abs().maxCoeff() < 1e-13);
}

TEST_CASE("gradient error of sin(2 pi x) quarters under refinement") {
  double prev = 0.0;
  for (int n : {16, 32, 64, 128}) {
    const Grid g = unit_square(n);
    const VectorField d = gradient(cells(g, [](double x, double) { return std::sin(2 * pi * x); }));
    double err = 0.0;
    const Extents fe = g.face_extents(0);
    detail::for_each_sample(fe, [&](const std::array<int, 3>& c, Index idx) {
      if (c[0] == 0 || c[0] == fe.n[0] - 1) return;  // walls copy the neighbour
      err = std::max(err, std::abs(d.component(0)[idx] - 2 * pi * std::cos(2 * pi * c[0] * g.spacing(0))));
    });
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("divergence of gradient is the five-point Laplacian") {
  const Grid g = unit_square(12);
  const ScalarField f = cells(g, [](double x, double y) { return std::sin(5 * x + 1) * y * y; },
                              BoundaryKind::DirichletZero);
  const ScalarField lap = laplacian(f);
  const double h2 = g.spacing(0) * g.spacing(0);
  auto at = [&](int i, int j) {
    // ghost 2b - f with b = 0 outside the box
    if (i < 0) return -f(0, j);
    if (i >= 12) return -f(11, j);
    if (j < 0) return -f(i, 0);
    if (j >= 12) return -f(i, 11);
    return f(i, j);
  };
  double worst = 0.0;
  for (int j = 0; j < 12; ++j)
    for (int i = 0; i < 12; ++i) {
      const double stencil = (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4 * at(i, j)) / h2;
      worst = std::max(worst, std::abs(lap(i, j) - stencil));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("Poincare inequality holds for Dirichlet fields") {
  const Grid g = unit_square(20);
  for (int k = 1; k <= 4; ++k) {
    const ScalarField f = cells(g, [&](double x, double y) { return std::sin(k * pi * x) * std::sin(pi * y) * (1 + x * y); },
                                BoundaryKind::DirichletZero);
    CHECK(lp_norm(f, 2.0) <= g.diameter() * gradient_lp_norm(f, 2.0));
  }
}

TEST_CASE("deformation dissipation") {
  const Grid g = unit_square(32);
  const ScalarField one = cells(g, [](double, double) { return 1.0; });
  CHECK(deformation_dissipation(VectorField(g), one) == 0.0);

  const VectorField rot = faces(g, [](int a, double x, double y) { return a == 0 ? -(y - 0.5) : x - 0.5; });
  CHECK(std::abs(deformation_dissipation(rot, one)) < 1e-12);

  // u = (y, 0): |D|^2 = 1/2, so int 2 |D|^2 = 1.
  const VectorField shear = faces(g, [](int a, double, double y) { return a == 0 ? y : 0.0; });
  CHECK(deformation_dissipation(shear, one) == doctest::Approx(1.0).epsilon(1.0 / (32 * 32)));
}

TEST_CASE("fields on different grids are rejected") {
  const ScalarField mu(unit_square(8));
  CHECK_THROWS_AS(deformation_dissipation(VectorField(unit_square(4)), mu), StructuralError);
}
