#pragma once

#include <filesystem>
#include <utility>

#include "benard/fields.hpp"
#include "benard/operators.hpp"
#include "benard/stokes.hpp"
#include "benard/transport.hpp"

namespace benard {

struct StepConfig {
  double cfl = 0.5;
  double dt_max = 1e-2;
  double u_floor = 1e-12;
  double projection_tol = 1e-11;  ///< relative: ||div u|| <= tol ||div u*||
  double momentum_tol = 1e-12;    ///< relative CG tolerance of the implicit viscous solve
  double thermal_tol = 1e-12;     ///< relative CG tolerance of the implicit heat solve
  double eps_rho = 1e-6;          ///< vacuum floor rho_eff = max(rho, eps_rho rho_bar)
  double rho_bar = 1.0;
  bool buoyancy = true;           ///< + rho theta e3 in the momentum equation
  bool heat_source = true;        ///< + rho u.e3 in the temperature equation
  bool freeze_velocity = false;   ///< diagnostic mode: u is never updated
  AdvectionScheme advection = AdvectionScheme::Upwind;
  MuAverage average = MuAverage::Arithmetic;
  double step_doubling_tol = 0.0;  ///< > 0 enables the step-doubling controller
};

/// One time slice (t, rho, u, theta, P).
struct FluidState {
  double t = 0.0;
  ScalarField rho;    ///< no boundary condition
  VectorField u;      ///< no-slip
  ScalarField theta;  ///< Dirichlet zero
  ScalarField P;      ///< mean zero

  const Grid& grid() const { return rho.grid(); }
  /// rho = rho0, u = 0, theta = 0, P = 0 on `grid`.
  static FluidState at_rest(const Grid& grid, double rho0);
};

struct StepReport {
  double dt_used = 0.0;
  int projection_iterations = 0;
  double div_residual = 0.0;  ///< discrete L^2 norm of div u after projection
  double ut_l2 = 0.0;         ///< ||sqrt(rho) (u^{n+1} - u^n)/dt||
  double thetat_l2 = 0.0;     ///< ||sqrt(rho) (theta^{n+1} - theta^n)/dt||
  int halvings = 0;           ///< step-doubling rejections
  double doubling_error = 0.0;
};

/// dt = min(dt_max, cfl h / max(max|u|, u_floor)); diffusion is implicit.
double stable_dt(const FluidState& state, const StepConfig& config);

struct ProjectionResult {
  VectorField u;
  ScalarField phi;
  int iterations = 0;
  double div_residual = 0.0;
};

/// Variable-density projection u = u* - (dt / rho_eff) grad phi with
/// div((1/rho_eff) grad phi) = div u* / dt and zero normal flux on walls.
ProjectionResult project(const VectorField& u_star, const ScalarField& rho, double dt,
                         const StepConfig& config);

/// Operator-split integrator with the grid operators assembled once.
///
/// A step runs: (1) upwind transport of rho; (2) momentum predictor with
/// explicit advection and buoyancy rho theta e3 and an implicit
/// variable-viscosity solve; (3) projection; (4) temperature with explicit
/// advection and source rho u.e3 and implicit kappa-diffusion. The density
/// after (1) is the one frozen in (2)-(4).
class Stepper {
 public:
  Stepper(const Grid& grid, const ViscosityLaw& law, double kappa, StepConfig config);

  const StepConfig& config() const { return config_; }

  std::pair<FluidState, StepReport> step(const FluidState& state, double dt) const;
  /// step() under the step-doubling controller when enabled: one dt step is
  /// compared with two dt/2 steps and dt halves until the relative difference
  /// stays within 10 * step_doubling_tol. Returns the two-half-step result.
  std::pair<FluidState, StepReport> controlled_step(const FluidState& state, double dt) const;

 private:
  ProjectionResult project(const VectorField& u_star, const ScalarField& rho, double dt) const;

  Grid grid_;
  ViscosityLaw law_;
  double kappa_;
  StepConfig config_;
  FaceNumbering faces_;
  SparseMatrix divergence_;
  SparseMatrix heat_;  ///< -Laplacian with Dirichlet-zero walls (SPD)
};

std::pair<FluidState, StepReport> step(const FluidState& state, const ViscosityLaw& law, double kappa,
                                       double dt, const StepConfig& config);

/// Flat little-endian checkpoint: int32 dim, int32 cells[dim], f64 lengths[dim],
/// f64 t, then rho, u_0 .. u_{dim-1}, theta, P as f64 arrays (axis 0 fastest).
void write_checkpoint(const FluidState& state, const std::filesystem::path& path);
FluidState read_checkpoint(const std::filesystem::path& path);

}  // namespace benard
