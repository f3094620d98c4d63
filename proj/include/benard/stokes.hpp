#pragma once

// Variable-viscosity Stokes operator on the MAC grid and its saddle-point
// solver:
//
//   -div(2 mu D(u)) + grad P = F,  div u = 0,  u = 0 on the walls.
//
// Unknowns are the velocity samples on interior faces; wall-normal faces are
// pinned to zero. The viscous matrix is assembled as the Hessian of the
// discrete dissipation sum, so u . A u * |cell| equals
// deformation_dissipation(u, mu) exactly.

#include <Eigen/Core>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <cmath>
#include <optional>

#include "benard/fields.hpp"
#include "benard/operators.hpp"

namespace benard {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Maps interior faces of every component onto a contiguous unknown vector.
class FaceNumbering {
 public:
  explicit FaceNumbering(const Grid& grid);

  const Grid& grid() const { return grid_; }
  Index unknowns() const { return count_; }
  /// Unknown id of face `face` of component `axis`, or -1 for wall-normal faces.
  Index id(int axis, Index face) const { return ids_[axis][face]; }

  Eigen::VectorXd gather(const VectorField& u) const;
  /// Per-face arrays (one per axis) restricted to interior faces.
  Eigen::VectorXd gather(const std::array<SampleArray<double>, 3>& per_axis) const;
  /// No-slip field with wall-normal faces set to zero.
  VectorField scatter(const Eigen::VectorXd& x) const;

 private:
  Grid grid_;
  std::array<std::vector<Index>, 3> ids_;
  Index count_ = 0;
};

/// Pointwise form of -div(2 mu D(u)) restricted to interior faces (SPD).
SparseMatrix viscous_matrix(const FaceNumbering& faces, const ScalarField& mu,
                            MuAverage mode = MuAverage::Arithmetic);

/// Cell divergence of the face unknowns; the discrete gradient is -D^T.
SparseMatrix divergence_matrix(const FaceNumbering& faces);

enum class Preconditioner { Diagonal, IncompleteCholesky };

/// Preconditioned CG on an SPD (or consistent semidefinite) system. Throws
/// SolverError labelled with `stage` when the relative tolerance is missed.
Eigen::VectorXd cg_solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs, double rel_tol,
                         const char* stage, const Eigen::VectorXd* guess = nullptr,
                         int max_iterations = 0, int* iterations = nullptr,
                         Preconditioner preconditioner = Preconditioner::Diagonal);

/// Discrete L^2 norm of a face or cell sample vector on a uniform grid.
inline double discrete_l2(const Eigen::VectorXd& v, double cell_volume) {
  return std::sqrt(cell_volume) * v.norm();
}

struct StokesProblem {
  ScalarField mu;
  VectorField forcing;
};

enum class InnerSolver { ConjugateGradient, Cholesky };

struct StokesOptions {
  double tol = 1e-9;          ///< absolute, on momentum and divergence residuals (discrete L^2)
  double inner_rel_tol = 1e-13;
  int max_outer = 2000;
  InnerSolver inner = InnerSolver::ConjugateGradient;
  MuAverage average = MuAverage::Arithmetic;
};

struct StokesSolution {
  VectorField u;
  ScalarField P;  ///< mean zero
  int iterations = 0;
  double residual = 0.0;  ///< max of the two residuals below
  double momentum_residual = 0.0;
  double divergence_residual = 0.0;
};

/// Pressure-Schur conjugate gradient (Uzawa form) with exact-to-tolerance
/// inner viscous solves, preconditioned by the cellwise viscosity.
StokesSolution solve_stokes(const StokesProblem& problem, const StokesOptions& options = {});

/// Ratios of the Stokes regularity estimate evaluated on a computed solution.
struct RegularityProbe {
  double ratio = 0.0;                      ///< ||u||_H2 / (||F||_2 (1 + ||grad mu||_q^{q/(q-3)}))
  double ratio_with_pressure = 0.0;        ///< (||u||_H2 + ||P||_H1) / same denominator
  double ratio_with_pressure_over_mu = 0.0;  ///< (||u||_H2 + ||P/mu||_H1) / same denominator
  std::optional<double> ratio_r;           ///< ||u||_H2 / (||F||_r (1 + ||grad mu||_q^{q(5r-6)/(2r(q-3))}))
  double u_h2 = 0.0;
  double forcing_l2 = 0.0;
  double grad_mu_lq = 0.0;
};

RegularityProbe regularity_probe(const StokesProblem& problem, const StokesSolution& solution,
                                 double q, std::optional<double> r = {});

}  // namespace benard
