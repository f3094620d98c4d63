#pragma once

// Reference problems with known answers: rigid rotation of a density blob,
// heat decay of the first Dirichlet eigenmode, and manufactured Stokes flows.

#include <vector>

#include "benard/initial.hpp"
#include "benard/stokes.hpp"
#include "benard/transport.hpp"

namespace benard {

struct RotationOracle {
  int steps = 0;
  double dt = 0.0;
  double mass_drift = 0.0;  ///< |m(T) - m(0)| / m(0), worst over all steps
  double rho0_min = 0.0, rho0_max = 0.0;
  double rho_min = 0.0, rho_max = 0.0;  ///< extremes over all steps
  double shape_l1_error = 0.0;          ///< ||rho(T) - rho0||_1 / ||rho0||_1
  double centroid_error = 0.0;          ///< distance between final and initial centers of mass
};

/// Compact rigid rotation (angular speed 2 pi, so one revolution per unit
/// time) of a Gaussian blob on the unit square, for `revolutions` turns.
RotationOracle rotation_oracle(int cells = 64, double cfl = 0.5, double revolutions = 1.0,
                               AdvectionScheme scheme = AdvectionScheme::Upwind);

/// Stream function of the rotation: -omega/2 r^2 near the center, flattened
/// smoothly to a constant before the walls.
double rotation_stream(const Point& p, double omega);

struct HeatOracle {
  double rate = 0.0;      ///< fitted decay rate of ||theta||_2^2
  double expected = 0.0;  ///< 2 kappa lambda_1 = 4 pi^2 kappa
  double rel_error = 0.0;
  int steps = 0;
};

/// Frozen u = 0, rho = 1, theta_0 = sin(pi x) sin(pi y) on the unit square.
HeatOracle heat_oracle(int cells = 64, double kappa = 1.0, double dt = 5e-4, double t_end = 1.5,
                       double fit_from = 1.0);

/// u = (sin^2(pi x) sin(2 pi y), -sin(2 pi x) sin^2(pi y)), P = cos(pi x) cos(pi y),
/// mu = 1 + amplitude sin(pi x) sin(pi y), on the unit square;
/// F = -div(2 mu D(u)) + grad P evaluated analytically.
struct ManufacturedStokes {
  double mu_amplitude = 0.0;

  double u(int axis, double x, double y) const;
  double p(double x, double y) const;
  double mu(double x, double y) const;
  double forcing(int axis, double x, double y) const;

  StokesProblem problem(const Grid& grid) const;
  VectorField exact_velocity(const Grid& grid) const;
};

struct StokesLevel {
  int cells = 0;
  double u_error = 0.0;  ///< discrete L^2 over face samples
  double p_error = 0.0;
  int iterations = 0;
  double residual = 0.0;
  RegularityProbe probe;
};

struct StokesConvergence {
  std::vector<StokesLevel> levels;
  std::vector<double> orders;  ///< log2 of successive error ratios
  double min_order() const;
  /// |ratio_fine / ratio_coarse - 1| over the two finest levels.
  double probe_drift() const;
};

StokesConvergence stokes_convergence(double mu_amplitude, const std::vector<int>& cells, double q = 4.0,
                                     const StokesOptions& options = {});

}  // namespace benard
