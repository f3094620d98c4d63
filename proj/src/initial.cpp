#include "benard/initial.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "benard/inequalities.hpp"
#include "benard/operators.hpp"

namespace benard {

ScalarField density_blob(const Grid& grid, const Point& center, double radius, double height,
                         double background, double edge) {
  ScalarField rho(grid);
  const Extents ce = grid.cell_extents();
  detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index idx) {
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double x = (c[a] + 0.5) * grid.spacing(a) - center[a];
      r2 += x * x;
    }
    const double s = 0.5 * (1.0 - std::tanh((std::sqrt(r2) - radius) / edge));
    rho.values()[idx] = background + (height - background) * s;
  });
  return rho;
}

VectorField stream_velocity(const Grid& grid, const std::function<double(const Point&)>& psi) {
  const int e3 = grid.vertical_axis();
  VectorField u(grid, VelocityBoundary::NoSlip);
  const double h1 = grid.spacing(0);
  const double h3 = grid.spacing(e3);
  // Nodes in the (0, e3) plane; any middle axis sits at cell centers.
  auto node = [&](std::array<int, 3> c) {
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < grid.dim(); ++a)
      p[a] = (a == 0 || a == e3) ? c[a] * grid.spacing(a) : (c[a] + 0.5) * grid.spacing(a);
    return psi(p);
  };
  const Extents f1 = grid.face_extents(0);
  detail::for_each_sample(f1, [&](const std::array<int, 3>& c, Index idx) {
    std::array<int, 3> hi = c;
    hi[e3] += 1;
    u.component(0)[idx] = (node(hi) - node(c)) / h3;
  });
  const Extents f3 = grid.face_extents(e3);
  detail::for_each_sample(f3, [&](const std::array<int, 3>& c, Index idx) {
    std::array<int, 3> hi = c;
    hi[0] += 1;
    u.component(e3)[idx] = -(node(hi) - node(c)) / h1;
  });
  u.enforce_no_slip();
  return u;
}

VectorField cellular_velocity(const Grid& grid, double amplitude) {
  const double pi = std::numbers::pi;
  const int e3 = grid.vertical_axis();
  return stream_velocity(grid, [&](const Point& p) {
    const double sx = std::sin(pi * p[0] / grid.length(0));
    const double sz = std::sin(pi * p[e3] / grid.length(e3));
    double v = amplitude * sx * sx * sz * sz;
    if (grid.dim() == 3) v *= std::sin(pi * p[1] / grid.length(1));
    return v;
  });
}

ScalarField temperature_modes(const Grid& grid, double amplitude, int max_mode, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalarField theta = random_sine_modes(rng, grid.dim(), max_mode).sample(grid);
  const double peak = theta.values().abs().maxCoeff();
  if (peak > 0.0) theta.values() *= amplitude / peak;
  return theta;
}

FluidState initial_state(const SimConfig& c) {
  const Grid grid = c.build();
  FluidState s = FluidState::at_rest(grid, 0.0);
  s.rho = density_blob(grid, c.blob_center, c.m0_radius, c.rho_bar, c.rho_background, c.blob_edge);
  if (c.vacuum_center) {
    const Extents ce = grid.cell_extents();
    detail::for_each_sample(ce, [&](const std::array<int, 3>& cc, Index idx) {
      double r2 = 0.0;
      for (int a = 0; a < grid.dim(); ++a) {
        const double x = (cc[a] + 0.5) * grid.spacing(a) - (*c.vacuum_center)[a];
        r2 += x * x;
      }
      if (r2 <= c.vacuum_radius * c.vacuum_radius) s.rho.values()[idx] = 0.0;
    });
  }
  s.u = cellular_velocity(grid, c.u_amplitude);
  s.theta = temperature_modes(grid, c.theta_amplitude, c.theta_modes, c.seed);
  return s;
}

}  // namespace benard
