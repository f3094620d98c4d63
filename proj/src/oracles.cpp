#include "benard/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "benard/ledger.hpp"
#include "benard/operators.hpp"
#include "benard/stepper.hpp"

namespace benard {

namespace {

constexpr double kPi = std::numbers::pi;

// Rigid core radius and the width of the blend to a flat stream function.
constexpr double kCore = 0.4;
constexpr double kBlend = 0.05;

double rotation_weight(double r) {
  if (r <= kCore) return 1.0;
  if (r >= kCore + kBlend) return 0.0;
  return 0.5 * (1.0 + std::cos(kPi * (r - kCore) / kBlend));
}

/// s(r) = int_0^r 2 s w(s) ds.
double rotation_profile(double r) {
  if (r <= kCore) return r * r;
  const double end = std::min(r, kCore + kBlend);
  const int n = 64;
  const double h = (end - kCore) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = kCore + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * 2.0 * s * rotation_weight(s);
  }
  return kCore * kCore + acc * h / 3.0;
}

double s2(double x) {
  const double s = std::sin(kPi * x);
  return s * s;
}
double s2_d1(double x) { return kPi * std::sin(2.0 * kPi * x); }
double s2_d2(double x) { return 2.0 * kPi * kPi * std::cos(2.0 * kPi * x); }
double s2_d3(double x) { return -4.0 * kPi * kPi * kPi * std::sin(2.0 * kPi * x); }

}  // namespace

double rotation_stream(const Point& p, double omega) {
  const double dx = p[0] - 0.5, dy = p[1] - 0.5;
  return -0.5 * omega * (rotation_profile(std::sqrt(dx * dx + dy * dy)) - rotation_profile(1.0));
}

RotationOracle rotation_oracle(int cells, double cfl, double revolutions, AdvectionScheme scheme) {
  const Grid grid = build_grid({2, {cells, cells, 1}, {1.0, 1.0, 1.0}});
  const double omega = 2.0 * kPi;
  const VectorField u = stream_velocity(grid, [&](const Point& p) { return rotation_stream(p, omega); });

  ScalarField rho(grid);
  const Extents ce = grid.cell_extents();
  detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index idx) {
    const double x = (c[0] + 0.5) * grid.spacing(0) - 0.5;
    const double y = (c[1] + 0.5) * grid.spacing(1) - 0.75;
    rho.values()[idx] = std::exp(-(x * x + y * y) / (2.0 * 0.05 * 0.05));
  });

  double umax = 0.0;
  for (int a = 0; a < 2; ++a) umax = std::max(umax, u.component(a).abs().maxCoeff());
  const double T = revolutions;
  const double dt_cfl = cfl * grid.min_spacing() / umax;
  RotationOracle out;
  out.steps = int(std::ceil(T / dt_cfl));
  out.dt = T / out.steps;

  const double m0 = rho.values().sum();
  out.rho0_min = out.rho_min = rho.values().minCoeff();
  out.rho0_max = out.rho_max = rho.values().maxCoeff();
  ScalarField cur = rho;
  for (int n = 0; n < out.steps; ++n) {
    cur = advect_density(cur, u, out.dt, scheme);
    out.mass_drift = std::max(out.mass_drift, std::abs(cur.values().sum() - m0) / m0);
    out.rho_min = std::min(out.rho_min, cur.values().minCoeff());
    out.rho_max = std::max(out.rho_max, cur.values().maxCoeff());
  }
  out.shape_l1_error = (cur.values() - rho.values()).abs().sum() / rho.values().abs().sum();
  auto centroid = [&](const ScalarField& f) {
    std::array<double, 2> c{0.0, 0.0};
    detail::for_each_sample(ce, [&](const std::array<int, 3>& i, Index idx) {
      for (int a = 0; a < 2; ++a) c[a] += f.values()[idx] * (i[a] + 0.5) * grid.spacing(a);
    });
    const double m = f.values().sum();
    return std::array<double, 2>{c[0] / m, c[1] / m};
  };
  const auto c0 = centroid(rho), c1 = centroid(cur);
  out.centroid_error = std::hypot(c1[0] - c0[0], c1[1] - c0[1]);
  return out;
}

HeatOracle heat_oracle(int cells, double kappa, double dt, double t_end, double fit_from) {
  const Grid grid = build_grid({2, {cells, cells, 1}, {1.0, 1.0, 1.0}});
  FluidState s = FluidState::at_rest(grid, 1.0);
  const Extents ce = grid.cell_extents();
  detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index idx) {
    s.theta.values()[idx] = std::sin(kPi * (c[0] + 0.5) * grid.spacing(0)) * std::sin(kPi * (c[1] + 0.5) * grid.spacing(1));
  });
  StepConfig cfg;
  cfg.freeze_velocity = true;
  cfg.buoyancy = false;
  cfg.heat_source = false;
  const Stepper stepper(grid, ViscosityLaw::affine(1.0, 0.0, 1.0), kappa, cfg);

  std::vector<LedgerRow> rows;
  auto record = [&] {
    LedgerRow r;
    r.t = s.t;
    r.E = (s.rho.values() * s.theta.values().square()).sum() * grid.cell_volume();
    rows.push_back(r);
  };
  record();
  HeatOracle out;
  out.steps = int(std::lround(t_end / dt));
  for (int n = 0; n < out.steps; ++n) {
    s = stepper.step(s, dt).first;
    record();
  }
  out.rate = fit_decay_rate(rows, fit_from, t_end + 0.5 * dt);
  out.expected = 2.0 * kappa * 2.0 * kPi * kPi;
  out.rel_error = std::abs(out.rate - out.expected) / out.expected;
  return out;
}

double ManufacturedStokes::u(int axis, double x, double y) const {
  return axis == 0 ? s2(x) * s2_d1(y) / kPi : -s2_d1(x) * s2(y) / kPi;
}

double ManufacturedStokes::p(double x, double y) const { return std::cos(kPi * x) * std::cos(kPi * y); }

double ManufacturedStokes::mu(double x, double y) const {
  return 1.0 + mu_amplitude * std::sin(kPi * x) * std::sin(kPi * y);
}

double ManufacturedStokes::forcing(int axis, double x, double y) const {
  // psi = S(x) S(y) / pi with S = sin^2(pi .); u = (psi_y, -psi_x).
  const double Sx = s2(x), Sy = s2(y);
  const double S1x = s2_d1(x), S1y = s2_d1(y);
  const double S2x = s2_d2(x), S2y = s2_d2(y);
  const double S3x = s2_d3(x), S3y = s2_d3(y);
  const double psi_xy = S1x * S1y / kPi;
  const double psi_xx = S2x * Sy / kPi;
  const double psi_yy = Sx * S2y / kPi;
  const double psi_xxy = S2x * S1y / kPi;
  const double psi_xyy = S1x * S2y / kPi;
  const double psi_xxx = S3x * Sy / kPi;
  const double psi_yyy = Sx * S3y / kPi;

  const double m = mu(x, y);
  const double mx = mu_amplitude * kPi * std::cos(kPi * x) * std::sin(kPi * y);
  const double my = mu_amplitude * kPi * std::sin(kPi * x) * std::cos(kPi * y);
  if (axis == 0) {
    const double dx_s11 = 2.0 * mx * psi_xy + 2.0 * m * psi_xxy;
    const double dy_s12 = my * (psi_yy - psi_xx) + m * (psi_yyy - psi_xxy);
    const double px = -kPi * std::sin(kPi * x) * std::cos(kPi * y);
    return -(dx_s11 + dy_s12) + px;
  }
  const double dx_s12 = mx * (psi_yy - psi_xx) + m * (psi_xyy - psi_xxx);
  const double dy_s22 = -2.0 * my * psi_xy - 2.0 * m * psi_xyy;
  const double py = -kPi * std::cos(kPi * x) * std::sin(kPi * y);
  return -(dx_s12 + dy_s22) + py;
}

namespace {

template <class Fn>
VectorField sample_faces(const Grid& grid, Fn&& fn) {
  VectorField v(grid, VelocityBoundary::None);
  for (int a = 0; a < 2; ++a) {
    const Extents fe = grid.face_extents(a);
    detail::for_each_sample(fe, [&](const std::array<int, 3>& c, Index idx) {
      const double x = a == 0 ? c[0] * grid.spacing(0) : (c[0] + 0.5) * grid.spacing(0);
      const double y = a == 1 ? c[1] * grid.spacing(1) : (c[1] + 0.5) * grid.spacing(1);
      v.component(a)[idx] = fn(a, x, y);
    });
  }
  return v;
}

}  // namespace

StokesProblem ManufacturedStokes::problem(const Grid& grid) const {
  StokesProblem pb;
  pb.mu = ScalarField(grid);
  const Extents ce = grid.cell_extents();
  detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index idx) {
    pb.mu.values()[idx] = mu((c[0] + 0.5) * grid.spacing(0), (c[1] + 0.5) * grid.spacing(1));
  });
  pb.forcing = sample_faces(grid, [&](int a, double x, double y) { return forcing(a, x, y); });
  return pb;
}

VectorField ManufacturedStokes::exact_velocity(const Grid& grid) const {
  VectorField v = sample_faces(grid, [&](int a, double x, double y) { return u(a, x, y); });
  v.set_boundary(VelocityBoundary::NoSlip);
  v.enforce_no_slip();
  return v;
}

double StokesConvergence::min_order() const {
  return orders.empty() ? 0.0 : *std::min_element(orders.begin(), orders.end());
}

double StokesConvergence::probe_drift() const {
  if (levels.size() < 2) return 0.0;
  const double a = levels[levels.size() - 2].probe.ratio;
  const double b = levels.back().probe.ratio;
  return std::abs(b / a - 1.0);
}

StokesConvergence stokes_convergence(double mu_amplitude, const std::vector<int>& cells, double q,
                                     const StokesOptions& options) {
  const ManufacturedStokes ms{mu_amplitude};
  StokesConvergence out;
  for (int n : cells) {
    const Grid grid = build_grid({2, {n, n, 1}, {1.0, 1.0, 1.0}});
    const StokesProblem pb = ms.problem(grid);
    const StokesSolution sol = solve_stokes(pb, options);
    VectorField err = ms.exact_velocity(grid);
    for (int a = 0; a < 2; ++a) err.component(a) -= sol.u.component(a);
    ScalarField perr(grid);
    const Extents ce = grid.cell_extents();
    detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index idx) {
      perr.values()[idx] = ms.p((c[0] + 0.5) * grid.spacing(0), (c[1] + 0.5) * grid.spacing(1));
    });
    perr.values() -= perr.values().mean();
    perr.values() -= sol.P.values();
    StokesLevel lv;
    lv.cells = n;
    lv.u_error = lp_norm(err, 2.0);
    lv.p_error = lp_norm(perr, 2.0);
    lv.iterations = sol.iterations;
    lv.residual = sol.residual;
    lv.probe = regularity_probe(pb, sol, q);
    if (!out.levels.empty()) {
      const auto& prev = out.levels.back();
      out.orders.push_back(std::log(prev.u_error / lv.u_error) / std::log(double(n) / prev.cells));
    }
    out.levels.push_back(lv);
  }
  return out;
}

}  // namespace benard
