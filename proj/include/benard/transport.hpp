#pragma once

#include <map>
#include <optional>
#include <vector>

#include "benard/fields.hpp"

namespace benard {

/// Density-to-viscosity map mu(rho) with declared bounds on [0, rho_bar].
///
/// Affine laws are a + b rho. Tabulated laws hold values at equally spaced
/// densities on [0, rho_bar] joined by a Fritsch-Carlson monotone cubic
/// (C^1); densities outside the table clamp to the end values.
class ViscosityLaw {
 public:
  enum class Kind { Affine, Tabulated };

  /// Declared bounds default to the extrema of a + b rho over [0, rho_bar].
  static ViscosityLaw affine(double a, double b, double rho_bar, std::optional<double> mu_min = {},
                             std::optional<double> mu_max = {});
  static ViscosityLaw tabulated(std::vector<double> values, double rho_bar,
                                std::optional<double> mu_min = {}, std::optional<double> mu_max = {});

  Kind kind() const { return kind_; }
  double mu_min() const { return mu_min_; }
  double mu_max() const { return mu_max_; }
  double rho_bar() const { return rho_bar_; }

  double operator()(double rho) const;
  double derivative(double rho) const;

 private:
  ViscosityLaw() = default;
  void validate() const;

  Kind kind_ = Kind::Affine;
  double a_ = 1.0;
  double b_ = 0.0;
  double rho_bar_ = 1.0;
  std::vector<double> table_;
  std::vector<double> slopes_;
  double mu_min_ = 1.0;
  double mu_max_ = 1.0;
};

enum class AdvectionScheme { Upwind, Muscl };

/// Largest outflow Courant number sum_faces max(u.n, 0) dt / h over all cells.
double outflow_courant(const VectorField& u, double dt);

/// One finite-volume step of rho_t + div(rho u) = 0 with zero wall flux.
///
/// Total mass is preserved to rounding. The upwind scheme is monotone for
/// outflow Courant <= 1; the minmod MUSCL variant requires <= 1/2. Larger
/// steps throw StabilityError.
ScalarField advect_density(const ScalarField& rho, const VectorField& u, double dt,
                           AdvectionScheme scheme = AdvectionScheme::Upwind);

/// Pointwise mu(rho); throws ViscosityBoundError if any value leaves the
/// declared bounds by more than `tol`, PositivityError if rho < -tol.
ScalarField viscosity_field(const ScalarField& rho, const ViscosityLaw& law, double tol = 1e-12);

/// ||grad mu(rho)||_{L^q} (entrywise over faces). q must exceed 3.
double grad_mu_lq(const ScalarField& rho, const ViscosityLaw& law, double q);

struct MassMoments {
  double m0 = 0.0;  ///< integral of rho
  std::map<double, double> lp;  ///< p in {1, 1.5, 3, inf}
  double rho_min = 0.0;
  double rho_max = 0.0;
};

/// Mass and Lebesgue norms of the density. Throws PositivityError when rho < -tol.
MassMoments mass_moments(const ScalarField& rho, double tol = 1e-12);

}  // namespace benard
