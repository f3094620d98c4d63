#include "benard/stepper.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "benard/error.hpp"

namespace benard {

FluidState FluidState::at_rest(const Grid& grid, double rho0) {
  FluidState s;
  s.rho = ScalarField(grid);
  s.rho.values().setConstant(rho0);
  s.u = VectorField(grid, VelocityBoundary::NoSlip);
  s.theta = ScalarField(grid, BoundaryKind::DirichletZero);
  s.P = ScalarField(grid);
  return s;
}

double stable_dt(const FluidState& state, const StepConfig& config) {
  double umax = 0.0;
  for (int a = 0; a < state.u.dim(); ++a)
    umax = std::max(umax, state.u.component(a).abs().maxCoeff());
  const double h = state.grid().min_spacing();
  return std::min(config.dt_max, config.cfl * h / std::max(umax, config.u_floor));
}

namespace {

SparseMatrix dirichlet_laplacian(const Grid& g) {
  const Extents ce = g.cell_extents();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(std::size_t(ce.size()) * (1 + 2 * g.dim()));
  detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index idx) {
    double diag = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double w = 1.0 / (g.spacing(a) * g.spacing(a));
      const Index s = ce.stride(a);
      for (int side : {-1, 1}) {
        const int nb = c[a] + side;
        if (nb < 0 || nb >= g.cells(a)) {
          diag += 2.0 * w;  // ghost -theta at the wall
        } else {
          diag += w;
          t.emplace_back(idx, idx + side * s, -w);
        }
      }
    }
    t.emplace_back(idx, idx, diag);
  });
  SparseMatrix L(ce.size(), ce.size());
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

/// Upwind u.grad(u) on every face, zero on wall-normal faces.
std::array<SampleArray<double>, 3> momentum_advection(const VectorField& u) {
  const Grid& g = u.grid();
  std::array<SampleArray<double>, 3> out;
  for (int c = 0; c < g.dim(); ++c) {
    const Extents fe = g.face_extents(c);
    const auto& uc = u.component(c);
    out[c] = SampleArray<double>::Zero(fe.size());
    detail::for_each_sample(fe, [&](const std::array<int, 3>& f, Index idx) {
      if (f[c] == 0 || f[c] == g.cells(c)) return;
      double acc = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        double vel;
        if (a == c) {
          vel = uc[idx];
        } else {
          // u_a averaged from its four faces around this c-face.
          const Extents ae = g.face_extents(a);
          const auto& ua = u.component(a);
          std::array<int, 3> q = f;
          vel = 0.0;
          for (int dc = -1; dc <= 0; ++dc)
            for (int da = 0; da <= 1; ++da) {
              q = f;
              q[c] += dc;
              q[a] += da;
              vel += ua[ae(q)];
            }
          vel *= 0.25;
        }
        const Index s = fe.stride(a);
        const double h = g.spacing(a);
        const int n = fe.n[a];
        const double here = uc[idx];
        const bool wall_axis = a != c;  // along a != c the samples are cell-centered
        auto neighbour = [&](int side) {
          const int j = f[a] + side;
          if (j < 0 || j >= n) return wall_axis ? -here : 0.0;
          return uc[idx + side * s];
        };
        const double deriv = vel >= 0.0 ? (here - neighbour(-1)) / h : (neighbour(1) - here) / h;
        acc += vel * deriv;
      }
      out[c][idx] = acc;
    });
  }
  return out;
}

/// Upwind u.grad(theta) at cell centers with the Dirichlet-zero ghost.
SampleArray<double> scalar_advection(const VectorField& u, const ScalarField& theta) {
  const Grid& g = u.grid();
  const Extents ce = g.cell_extents();
  SampleArray<double> out = SampleArray<double>::Zero(ce.size());
  const auto& v = theta.values();
  for (int a = 0; a < g.dim(); ++a) {
    const auto ubar = cell_average(u, a);
    const Index s = ce.stride(a);
    const double h = g.spacing(a);
    detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index idx) {
      const double vel = ubar[idx];
      const double here = v[idx];
      if (vel >= 0.0) {
        const double lo = c[a] > 0 ? v[idx - s] : -here;
        out[idx] += vel * (here - lo) / h;
      } else {
        const double hi = c[a] + 1 < g.cells(a) ? v[idx + s] : -here;
        out[idx] += vel * (hi - here) / h;
      }
    });
  }
  return out;
}

double weighted_rate(const Eigen::VectorXd& diff, const Eigen::VectorXd& weight, double dt, double vol) {
  return std::sqrt(vol * (weight.array() * diff.array().square()).sum()) / dt;
}

}  // namespace

Stepper::Stepper(const Grid& grid, const ViscosityLaw& law, double kappa, StepConfig config)
    : grid_(grid),
      law_(law),
      kappa_(kappa),
      config_(config),
      faces_(grid),
      divergence_(divergence_matrix(faces_)),
      heat_(dirichlet_laplacian(grid)) {
  if (!(kappa > 0.0)) throw ConfigError("kappa: must be positive");
}

namespace {

ProjectionResult project_with(const FaceNumbering& faces, const SparseMatrix& divergence,
                              const VectorField& u_star, const ScalarField& rho, double dt,
                              const StepConfig& config) {
  const Grid& grid = faces.grid();
  require_same_grid(u_star, rho, "project");
  if (!(dt > 0.0)) throw DomainError("project: dt must be positive");
  const double vol = grid.cell_volume();
  const double floor = config.eps_rho * config.rho_bar;
  std::array<SampleArray<double>, 3> inv_rho;
  for (int a = 0; a < grid.dim(); ++a)
    inv_rho[a] = face_average(rho, a).unaryExpr([&](double r) { return 1.0 / std::max(r, floor); });
  const Eigen::VectorXd R = faces.gather(inv_rho);
  const Eigen::VectorXd us = faces.gather(u_star);
  Eigen::VectorXd b = -(divergence * us) / dt;
  b.array() -= b.mean();
  ProjectionResult out;
  out.phi = ScalarField(grid);
  Eigen::VectorXd x = us;
  if (b.norm() > 0.0) {
    const SparseMatrix L = divergence * R.asDiagonal() * divergence.transpose();
    const Eigen::VectorXd phi = cg_solve(L, b, config.projection_tol, "projection", nullptr, 0, &out.iterations);
    x += dt * R.cwiseProduct(divergence.transpose() * phi);
    out.phi.values() = phi.array() - phi.mean();
  }
  out.u = faces.scatter(x);
  out.div_residual = discrete_l2(divergence * x, vol);
  return out;
}

}  // namespace

ProjectionResult Stepper::project(const VectorField& u_star, const ScalarField& rho, double dt) const {
  return project_with(faces_, divergence_, u_star, rho, dt, config_);
}

ProjectionResult project(const VectorField& u_star, const ScalarField& rho, double dt, const StepConfig& config) {
  const FaceNumbering faces(u_star.grid());
  return project_with(faces, divergence_matrix(faces), u_star, rho, dt, config);
}

std::pair<FluidState, StepReport> Stepper::step(const FluidState& s0, double dt) const {
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
  const double vol = grid_.cell_volume();
  StepReport report;
  report.dt_used = dt;
  FluidState s1;
  s1.t = s0.t + dt;

  // (1) density transport
  s1.rho = advect_density(s0.rho, s0.u, dt, config_.advection);
  std::array<SampleArray<double>, 3> rho_face;
  for (int a = 0; a < grid_.dim(); ++a) rho_face[a] = face_average(s1.rho, a);
  const Eigen::VectorXd M = faces_.gather(rho_face);
  const Eigen::VectorXd u0 = faces_.gather(s0.u);

  // (2) + (3) momentum predictor and projection
  Eigen::VectorXd u1 = u0;
  if (config_.freeze_velocity) {
    s1.u = s0.u;
    s1.P = s0.P;
  } else {
    ScalarField mu;
    try {
      mu = viscosity_field(s1.rho, law_);
    } catch (const Error& e) {
      throw ViscosityBoundError(std::string("momentum: ") + e.what());
    }
    const SparseMatrix A = viscous_matrix(faces_, mu, config_.average);
    const Eigen::VectorXd adv = faces_.gather(momentum_advection(s0.u));
    Eigen::VectorXd rhs = M.cwiseProduct(u0 - dt * adv) / dt;
    if (config_.buoyancy) {
      ScalarField rho_theta = s1.rho;
      rho_theta.values() *= s0.theta.values();
      std::array<SampleArray<double>, 3> force;
      const int e3 = grid_.vertical_axis();
      for (int a = 0; a < grid_.dim(); ++a)
        force[a] = a == e3 ? face_average(rho_theta, a) : SampleArray<double>::Zero(grid_.face_extents(a).size());
      rhs += faces_.gather(force);
    }
    SparseMatrix K = A;
    K.diagonal() += M / dt;
    Eigen::VectorXd u_star;
    try {
      u_star = cg_solve(K, rhs, config_.momentum_tol, "momentum", &u0);
    } catch (const SolverError& e) {
      throw SolverError(std::string("step/momentum: ") + e.what(), e.residual());
    }
    ProjectionResult pr;
    try {
      pr = project(faces_.scatter(u_star), s1.rho, dt);
    } catch (const SolverError& e) {
      throw SolverError(std::string("step/projection: ") + e.what(), e.residual());
    }
    s1.u = std::move(pr.u);
    s1.P = std::move(pr.phi);
    report.projection_iterations = pr.iterations;
    report.div_residual = pr.div_residual;
    u1 = faces_.gather(s1.u);
  }
  if (config_.freeze_velocity) report.div_residual = discrete_l2(divergence_ * u1, vol);
  report.ut_l2 = weighted_rate(u1 - u0, M, dt, vol);

  // (4) temperature
  const Eigen::ArrayXd rho_c = s1.rho.values();
  const Eigen::ArrayXd th0 = s0.theta.values();
  Eigen::VectorXd rhs = (rho_c * (th0 - dt * scalar_advection(s1.u, s0.theta)) / dt).matrix();
  if (config_.heat_source) rhs += (rho_c * cell_average(s1.u, grid_.vertical_axis())).matrix();
  SparseMatrix K = kappa_ * heat_;
  K.diagonal() += (rho_c / dt).matrix();
  Eigen::VectorXd th1;
  const Eigen::VectorXd guess = th0.matrix();
  try {
    th1 = cg_solve(K, rhs, config_.thermal_tol, "temperature", &guess);
  } catch (const SolverError& e) {
    throw SolverError(std::string("step/temperature: ") + e.what(), e.residual());
  }
  s1.theta = ScalarField(grid_, BoundaryKind::DirichletZero);
  s1.theta.values() = th1.array();
  report.thetat_l2 = weighted_rate(th1 - th0.matrix(), rho_c.matrix(), dt, vol);
  return {std::move(s1), report};
}

std::pair<FluidState, StepReport> Stepper::controlled_step(const FluidState& state, double dt) const {
  if (!(config_.step_doubling_tol > 0.0)) return step(state, dt);
  int halvings = 0;
  for (;;) {
    const auto full = step(state, dt);
    const auto half = step(step(state, 0.5 * dt).first, 0.5 * dt);
    VectorField diff_u = full.first.u;
    for (int a = 0; a < grid_.dim(); ++a) diff_u.component(a) -= half.first.u.component(a);
    ScalarField diff_t = full.first.theta;
    diff_t.values() -= half.first.theta.values();
    const double scale = lp_norm(half.first.u, 2.0) + lp_norm(half.first.theta, 2.0);
    const double diff = lp_norm(diff_u, 2.0) + lp_norm(diff_t, 2.0);
    const double err = diff == 0.0 ? 0.0 : diff / std::max(scale, 1e-300);
    if (err <= 10.0 * config_.step_doubling_tol || halvings >= 40) {
      auto out = half;
      out.second.dt_used = dt;
      out.second.halvings = halvings;
      out.second.doubling_error = err;
      return out;
    }
    dt *= 0.5;
    ++halvings;
  }
}

std::pair<FluidState, StepReport> step(const FluidState& state, const ViscosityLaw& law, double kappa, double dt,
                                       const StepConfig& config) {
  return Stepper(state.grid(), law, kappa, config).step(state, dt);
}

namespace {

template <class T>
void put(std::ofstream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "checkpoint io assumes a little-endian host");
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::ifstream& is, const std::string& what) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw IoError("checkpoint truncated at " + what);
  return v;
}

void put_array(std::ofstream& os, const SampleArray<double>& a) {
  os.write(reinterpret_cast<const char*>(a.data()), std::streamsize(a.size() * sizeof(double)));
}

void take_array(std::ifstream& is, SampleArray<double>& a, const std::string& what) {
  if (!is.read(reinterpret_cast<char*>(a.data()), std::streamsize(a.size() * sizeof(double))))
    throw IoError("checkpoint truncated at " + what);
}

}  // namespace

void write_checkpoint(const FluidState& state, const std::filesystem::path& path) {
  const Grid& g = state.grid();
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string());
    put<std::int32_t>(os, g.dim());
    for (int a = 0; a < g.dim(); ++a) put<std::int32_t>(os, g.cells(a));
    for (int a = 0; a < g.dim(); ++a) put<double>(os, g.length(a));
    put<double>(os, state.t);
    put_array(os, state.rho.values());
    for (int a = 0; a < g.dim(); ++a) put_array(os, state.u.component(a));
    put_array(os, state.theta.values());
    put_array(os, state.P.values());
    if (!os) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

FluidState read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  GridSettings gs;
  gs.dim = take<std::int32_t>(is, "dim");
  if (gs.dim != 2 && gs.dim != 3) throw IoError("checkpoint: bad dimension " + std::to_string(gs.dim));
  for (int a = 0; a < gs.dim; ++a) gs.cells[a] = take<std::int32_t>(is, "cells");
  for (int a = 0; a < gs.dim; ++a) gs.lengths[a] = take<double>(is, "lengths");
  Grid g;
  try {
    g = build_grid(gs);
  } catch (const ConfigError& e) {
    throw IoError(std::string("checkpoint header: ") + e.what());
  }
  FluidState s = FluidState::at_rest(g, 0.0);
  s.t = take<double>(is, "t");
  take_array(is, s.rho.values(), "rho");
  for (int a = 0; a < g.dim(); ++a) take_array(is, s.u.component(a), "u");
  take_array(is, s.theta.values(), "theta");
  take_array(is, s.P.values(), "P");
  char extra;
  if (is.read(&extra, 1)) throw IoError("checkpoint has trailing bytes");
  return s;
}

}  // namespace benard
