#include "benard/inequalities.hpp"

#include <cmath>
#include <numbers>

#include "benard/error.hpp"
#include "benard/operators.hpp"

namespace benard {

InequalityProbeResult poincare_ratio(const ScalarField& f, std::string descriptor) {
  if (f.boundary() != BoundaryKind::DirichletZero)
    throw DomainError("poincare_ratio: field must carry a Dirichlet-zero boundary");
  const double num = lp_norm(f, 2.0);
  const double den = gradient_lp_norm(f, 2.0);
  if (num == 0.0 || den == 0.0) throw DegenerateInputError("poincare_ratio: field is identically zero");
  InequalityProbeResult r;
  r.ratio = num / den;
  r.bound = f.grid().diameter();
  r.satisfied = r.ratio <= *r.bound;
  r.field = std::move(descriptor);
  return r;
}

std::pair<double, double> gn_exponents(double p) {
  return {(6.0 - p) / (2.0 * p), (3.0 * p - 6.0) / (2.0 * p)};
}

InequalityProbeResult gn_ratio(const ScalarField& f, double p, std::string descriptor) {
  if (!(p >= 2.0 && p <= 6.0))
    throw DomainError("gn_ratio: exponent must lie in [2, 6], got " + std::to_string(p));
  const double lp = lp_norm(f, p);
  const double l2 = lp_norm(f, 2.0);
  const double g2 = gradient_lp_norm(f, 2.0);
  if (l2 == 0.0) throw DegenerateInputError("gn_ratio: field is identically zero");
  const auto [a, b] = gn_exponents(p);
  // b == 0 at p = 2; keep 0^0 = 1 so constant fields are admissible there.
  const double den = std::pow(l2, a) * (b == 0.0 ? 1.0 : std::pow(g2, b));
  if (den == 0.0) throw DegenerateInputError("gn_ratio: gradient vanishes");
  InequalityProbeResult r;
  r.ratio = lp / den;
  r.field = std::move(descriptor);
  return r;
}

double SineModeField::evaluate(const Grid& grid, double x, double y, double z) const {
  const double pts[3] = {x, y, z};
  double s[3][16];
  for (int a = 0; a < dim; ++a)
    for (int k = 1; k <= max_mode; ++k)
      s[a][k - 1] = std::sin(k * std::numbers::pi * pts[a] / grid.length(a));
  double v = 0.0;
  const int nz = dim == 3 ? max_mode : 1;
  std::size_t idx = 0;
  for (int kz = 0; kz < nz; ++kz)
    for (int ky = 0; ky < max_mode; ++ky)
      for (int kx = 0; kx < max_mode; ++kx, ++idx) {
        double t = coefficients[idx] * s[0][kx] * s[1][ky];
        if (dim == 3) t *= s[2][kz];
        v += t;
      }
  return v;
}

ScalarField SineModeField::sample(const Grid& grid) const {
  ScalarField f(grid, BoundaryKind::DirichletZero);
  detail::for_each_sample(f.extents(), [&](const std::array<int, 3>& c, Index idx) {
    f.values()[idx] = evaluate(grid, f.center(0, c[0]), f.center(1, c[1]),
                               grid.dim() == 3 ? f.center(2, c[2]) : 0.0);
  });
  return f;
}

SineModeField random_sine_modes(std::mt19937_64& rng, int dim, int max_mode) {
  if (max_mode < 1 || max_mode > 16) throw DomainError("random_sine_modes: max_mode must be in [1, 16]");
  std::normal_distribution<double> normal(0.0, 1.0);
  SineModeField field;
  field.dim = dim;
  field.max_mode = max_mode;
  const int nz = dim == 3 ? max_mode : 1;
  for (int kz = 1; kz <= nz; ++kz)
    for (int ky = 1; ky <= max_mode; ++ky)
      for (int kx = 1; kx <= max_mode; ++kx)
        field.coefficients.push_back(normal(rng) / double(kx * ky * kz));
  return field;
}

ProbeSuiteResult run_probe_suite(const Grid& grid, int count, std::uint64_t seed,
                                 const std::vector<double>& exponents, int max_mode) {
  std::mt19937_64 rng(seed);
  ProbeSuiteResult out;
  for (int n = 0; n < count; ++n) {
    const auto modes = random_sine_modes(rng, grid.dim(), max_mode);
    const ScalarField f = modes.sample(grid);
    const std::string name = "random-sine-" + std::to_string(n);
    const auto pr = poincare_ratio(f, name);
    out.max_poincare = std::max(out.max_poincare, pr.ratio);
    out.poincare_all_satisfied = out.poincare_all_satisfied && pr.satisfied;
    for (double p : exponents) {
      const double ratio = gn_ratio(f, p, name).ratio;
      out.gn_ratios[p].push_back(ratio);
      out.gn_max[p] = std::max(out.gn_max[p], ratio);
      if (p == 2.0) out.gn2_max_deviation = std::max(out.gn2_max_deviation, std::abs(ratio - 1.0));
    }
    ++out.fields;
  }
  return out;
}

}  // namespace benard
