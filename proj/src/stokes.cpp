#include "benard/stokes.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <string>
#include <vector>

#include "benard/error.hpp"

namespace benard {

FaceNumbering::FaceNumbering(const Grid& grid) : grid_(grid) {
  for (int a = 0; a < grid.dim(); ++a) {
    const Extents fe = grid.face_extents(a);
    ids_[a].assign(fe.size(), -1);
    detail::for_each_sample(fe, [&](const std::array<int, 3>& c, Index idx) {
      if (c[a] > 0 && c[a] < grid.cells(a)) ids_[a][idx] = count_++;
    });
  }
}

Eigen::VectorXd FaceNumbering::gather(const VectorField& u) const {
  Eigen::VectorXd x(count_);
  for (int a = 0; a < grid_.dim(); ++a) {
    const auto& comp = u.component(a);
    for (Index f = 0; f < Index(ids_[a].size()); ++f)
      if (ids_[a][f] >= 0) x[ids_[a][f]] = comp[f];
  }
  return x;
}

Eigen::VectorXd FaceNumbering::gather(const std::array<SampleArray<double>, 3>& per_axis) const {
  Eigen::VectorXd x(count_);
  for (int a = 0; a < grid_.dim(); ++a)
    for (Index f = 0; f < Index(ids_[a].size()); ++f)
      if (ids_[a][f] >= 0) x[ids_[a][f]] = per_axis[a][f];
  return x;
}

VectorField FaceNumbering::scatter(const Eigen::VectorXd& x) const {
  VectorField u(grid_, VelocityBoundary::NoSlip);
  for (int a = 0; a < grid_.dim(); ++a) {
    auto& comp = u.component(a);
    for (Index f = 0; f < Index(ids_[a].size()); ++f)
      comp[f] = ids_[a][f] >= 0 ? x[ids_[a][f]] : 0.0;
  }
  return u;
}

namespace {

using Triplet = Eigen::Triplet<double>;

struct Term {
  Index id;
  double coef;
};

/// Adds weight * a a^T for the sparse row `a`.
void add_outer(std::vector<Triplet>& t, const Term* row, int len, double weight) {
  for (int i = 0; i < len; ++i) {
    if (row[i].id < 0) continue;
    for (int j = 0; j < len; ++j) {
      if (row[j].id < 0) continue;
      t.emplace_back(row[i].id, row[j].id, weight * row[i].coef * row[j].coef);
    }
  }
}

/// d u_b / d x_a at edge sample `e` of edge(a, b) as (up to) two terms,
/// using the no-slip ghost at walls normal to `a`.
int edge_derivative(const FaceNumbering& faces, int a, int b, std::array<int, 3> e, Term* out) {
  const Grid& g = faces.grid();
  const Extents fb = g.face_extents(b);
  const double inv_h = 1.0 / g.spacing(a);
  const int i = e[a];
  const int n = g.cells(a);
  if (i > 0 && i < n) {
    out[0] = {faces.id(b, fb(e)), inv_h};
    e[a] = i - 1;
    out[1] = {faces.id(b, fb(e)), -inv_h};
    return 2;
  }
  if (i == 0) {
    out[0] = {faces.id(b, fb(e)), 2.0 * inv_h};
  } else {
    e[a] = n - 1;
    out[0] = {faces.id(b, fb(e)), -2.0 * inv_h};
  }
  return 1;
}

}  // namespace

SparseMatrix viscous_matrix(const FaceNumbering& faces, const ScalarField& mu, MuAverage mode) {
  const Grid& g = faces.grid();
  if (!(mu.grid() == g)) throw StructuralError("viscous_matrix: viscosity lives on a different grid");
  if (!(mu.values().minCoeff() > 0.0)) throw ViscosityBoundError("viscous_matrix: viscosity must be positive");
  std::vector<Triplet> t;
  t.reserve(std::size_t(faces.unknowns()) * (4 + 8 * g.dim()));
  const Extents ce = g.cell_extents();
  // Normal strains at cell centers: weight 2 mu.
  for (int c = 0; c < g.dim(); ++c) {
    const Extents fe = g.face_extents(c);
    const double inv_h = 1.0 / g.spacing(c);
    detail::for_each_sample(ce, [&](const std::array<int, 3>& cc, Index idx) {
      const Index lo = fe(cc);
      const Term row[2] = {{faces.id(c, lo + fe.stride(c)), inv_h}, {faces.id(c, lo), -inv_h}};
      add_outer(t, row, 2, 2.0 * mu.values()[idx]);
    });
  }
  // Shear strains s = d_a u_b + d_b u_a on edges: weight mu_e (2 mu * 2 * (s/2)^2).
  for (int a = 0; a < g.dim(); ++a) {
    for (int b = a + 1; b < g.dim(); ++b) {
      const Extents ee = g.edge_extents(a, b);
      const auto mu_e = edge_average(mu, a, b, mode);
      const auto st = detail::edge_stagger(a, b);
      detail::for_each_sample(ee, [&](const std::array<int, 3>& c, Index idx) {
        Term row[4];
        int len = edge_derivative(faces, a, b, c, row);
        len += edge_derivative(faces, b, a, c, row + len);
        const double w = detail::sample_weight(c, ee, st, 1.0);
        add_outer(t, row, len, w * mu_e[idx]);
      });
    }
  }
  SparseMatrix A(faces.unknowns(), faces.unknowns());
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

SparseMatrix divergence_matrix(const FaceNumbering& faces) {
  const Grid& g = faces.grid();
  const Extents ce = g.cell_extents();
  std::vector<Triplet> t;
  t.reserve(std::size_t(ce.size()) * 2 * g.dim());
  for (int a = 0; a < g.dim(); ++a) {
    const Extents fe = g.face_extents(a);
    const double inv_h = 1.0 / g.spacing(a);
    detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index idx) {
      const Index lo = fe(c);
      const Index hi_id = faces.id(a, lo + fe.stride(a));
      const Index lo_id = faces.id(a, lo);
      if (hi_id >= 0) t.emplace_back(idx, hi_id, inv_h);
      if (lo_id >= 0) t.emplace_back(idx, lo_id, -inv_h);
    });
  }
  SparseMatrix D(ce.size(), faces.unknowns());
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

namespace {

template <class Solver>
Eigen::VectorXd run_cg(Solver& cg, const SparseMatrix& matrix, const Eigen::VectorXd& rhs, double rel_tol,
                       const char* stage, const Eigen::VectorXd* guess, int max_iterations, int* iterations) {
  cg.setTolerance(rel_tol);
  cg.setMaxIterations(max_iterations > 0 ? max_iterations : int(std::max<Index>(1000, 20 * rhs.size())));
  cg.compute(matrix);
  if (cg.info() != Eigen::Success) throw SolverError(std::string(stage) + ": preconditioner setup failed", INFINITY);
  Eigen::VectorXd x;
  if (guess)
    x = cg.solveWithGuess(rhs, *guess);
  else
    x = cg.solve(rhs);
  if (iterations) *iterations = int(cg.iterations());
  if (cg.info() != Eigen::Success || !x.allFinite())
    throw SolverError(std::string(stage) + ": conjugate gradient did not converge (relative residual " +
                          std::to_string(cg.error()) + " after " + std::to_string(cg.iterations()) +
                          " iterations)",
                      cg.error());
  return x;
}

}  // namespace

Eigen::VectorXd cg_solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs, double rel_tol,
                         const char* stage, const Eigen::VectorXd* guess, int max_iterations,
                         int* iterations, Preconditioner preconditioner) {
  if (iterations) *iterations = 0;
  if (rhs.squaredNorm() == 0.0) return Eigen::VectorXd::Zero(rhs.size());
  if (preconditioner == Preconditioner::Diagonal) {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    return run_cg(cg, matrix, rhs, rel_tol, stage, guess, max_iterations, iterations);
  }
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
  return run_cg(cg, matrix, rhs, rel_tol, stage, guess, max_iterations, iterations);
}

namespace {

/// A^{-1} b for the viscous block, by CG or by a sparse Cholesky factorization.
class ViscousInverse {
 public:
  ViscousInverse(const SparseMatrix& A, const StokesOptions& opt) : A_(A), opt_(opt) {
    if (opt.inner == InnerSolver::Cholesky) {
      ldlt_.compute(A);
      if (ldlt_.info() != Eigen::Success) throw SolverError("stokes: viscous factorization failed", 0.0);
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    if (opt_.inner == InnerSolver::Cholesky) return ldlt_.solve(b);
    return cg_solve(A_, b, opt_.inner_rel_tol, "stokes viscous block");
  }

 private:
  const SparseMatrix& A_;
  StokesOptions opt_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

void remove_mean(Eigen::VectorXd& v) {
  if (v.size() > 0) v.array() -= v.mean();
}

}  // namespace

StokesSolution solve_stokes(const StokesProblem& problem, const StokesOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("solve_stokes: tolerance must be positive");
  require_same_grid(problem.mu, problem.forcing, "solve_stokes");
  const Grid& g = problem.mu.grid();
  const double vol = g.cell_volume();
  const FaceNumbering faces(g);
  const SparseMatrix A = viscous_matrix(faces, problem.mu, options.average);
  const SparseMatrix D = divergence_matrix(faces);
  const ViscousInverse inverse(A, options);
  const Eigen::VectorXd f = faces.gather(problem.forcing);
  const Eigen::ArrayXd precond = problem.mu.values();

  Eigen::VectorXd p = Eigen::VectorXd::Zero(D.rows());
  Eigen::VectorXd u = inverse.solve(f);
  Eigen::VectorXd r = -(D * u);
  Eigen::VectorXd z = (precond * r.array()).matrix();
  remove_mean(z);
  Eigen::VectorXd d = z;
  double rz = r.dot(z);
  int it = 0;
  while (discrete_l2(r, vol) > 0.1 * options.tol) {
    if (it >= options.max_outer)
      throw SolverError("solve_stokes: pressure iteration did not converge", discrete_l2(r, vol));
    const Eigen::VectorXd y = inverse.solve(D.transpose() * d);
    const Eigen::VectorXd w = D * y;
    const double dw = d.dot(w);
    if (!(dw > 0.0)) break;
    const double alpha = rz / dw;
    p += alpha * d;
    u += alpha * y;
    r -= alpha * w;
    z = (precond * r.array()).matrix();
    remove_mean(z);
    const double rz_new = r.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
    ++it;
  }
  remove_mean(p);
  u = inverse.solve(f + D.transpose() * p);

  StokesSolution sol;
  sol.u = faces.scatter(u);
  sol.P = ScalarField(g);
  sol.P.values() = p.array();
  sol.iterations = it;
  sol.momentum_residual = discrete_l2(A * u - D.transpose() * p - f, vol);
  sol.divergence_residual = discrete_l2(D * u, vol);
  sol.residual = std::max(sol.momentum_residual, sol.divergence_residual);
  if (!(sol.residual <= options.tol))
    throw SolverError("solve_stokes: final residual " + std::to_string(sol.residual) + " above tolerance",
                      sol.residual);
  return sol;
}

RegularityProbe regularity_probe(const StokesProblem& problem, const StokesSolution& solution, double q,
                                 std::optional<double> r) {
  if (!(q > 3.0)) throw DomainError("regularity_probe: q must exceed 3");
  RegularityProbe out;
  out.forcing_l2 = lp_norm(problem.forcing, 2.0);
  if (out.forcing_l2 == 0.0) throw DegenerateInputError("regularity_probe: zero forcing gives 0/0");
  out.grad_mu_lq = gradient_lp_norm(problem.mu, q);
  out.u_h2 = h2_norm(solution.u);
  const double factor = 1.0 + std::pow(out.grad_mu_lq, q / (q - 3.0));
  const double den = out.forcing_l2 * factor;
  out.ratio = out.u_h2 / den;
  out.ratio_with_pressure = (out.u_h2 + h1_norm(solution.P)) / den;
  ScalarField p_over_mu = solution.P;
  p_over_mu.values() /= problem.mu.values();
  out.ratio_with_pressure_over_mu = (out.u_h2 + h1_norm(p_over_mu)) / den;
  if (r) {
    const double rr = *r;
    const double exponent = q * (5.0 * rr - 6.0) / (2.0 * rr * (q - 3.0));
    out.ratio_r = out.u_h2 / (lp_norm(problem.forcing, rr) * (1.0 + std::pow(out.grad_mu_lq, exponent)));
  }
  return out;
}

}  // namespace benard
