#include "benard/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "benard/error.hpp"
#include "benard/operators.hpp"

namespace benard {

ViscosityLaw ViscosityLaw::affine(double a, double b, double rho_bar, std::optional<double> mu_min,
                                  std::optional<double> mu_max) {
  if (!(rho_bar > 0.0)) throw ConfigError("rho_bar: must be positive");
  ViscosityLaw law;
  law.kind_ = Kind::Affine;
  law.a_ = a;
  law.b_ = b;
  law.rho_bar_ = rho_bar;
  law.mu_min_ = mu_min.value_or(std::min(a, a + b * rho_bar));
  law.mu_max_ = mu_max.value_or(std::max(a, a + b * rho_bar));
  law.validate();
  return law;
}

ViscosityLaw ViscosityLaw::tabulated(std::vector<double> values, double rho_bar,
                                     std::optional<double> mu_min, std::optional<double> mu_max) {
  if (!(rho_bar > 0.0)) throw ConfigError("rho_bar: must be positive");
  if (values.size() < 2) throw ConfigError("mu_table: at least two values required");
  ViscosityLaw law;
  law.kind_ = Kind::Tabulated;
  law.rho_bar_ = rho_bar;
  law.table_ = std::move(values);
  const auto& t = law.table_;
  const std::size_t n = t.size();
  const double h = rho_bar / double(n - 1);
  std::vector<double> secant(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) secant[k] = (t[k + 1] - t[k]) / h;
  std::vector<double> m(n);
  m[0] = secant[0];
  m[n - 1] = secant[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k)
    m[k] = (secant[k - 1] * secant[k] <= 0.0) ? 0.0 : 0.5 * (secant[k - 1] + secant[k]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (secant[k] == 0.0) {
      m[k] = m[k + 1] = 0.0;
      continue;
    }
    const double alpha = m[k] / secant[k];
    const double beta = m[k + 1] / secant[k];
    const double s = alpha * alpha + beta * beta;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      m[k] = tau * alpha * secant[k];
      m[k + 1] = tau * beta * secant[k];
    }
  }
  law.slopes_ = std::move(m);
  law.mu_min_ = mu_min.value_or(*std::min_element(t.begin(), t.end()));
  law.mu_max_ = mu_max.value_or(*std::max_element(t.begin(), t.end()));
  law.validate();
  return law;
}

double ViscosityLaw::operator()(double rho) const {
  if (kind_ == Kind::Affine) return a_ + b_ * rho;
  const std::size_t n = table_.size();
  const double h = rho_bar_ / double(n - 1);
  if (rho <= 0.0) return table_.front();
  if (rho >= rho_bar_) return table_.back();
  const std::size_t k = std::min(n - 2, std::size_t(rho / h));
  const double s = (rho - k * h) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * table_[k] + h10 * h * slopes_[k] + h01 * table_[k + 1] + h11 * h * slopes_[k + 1];
}

double ViscosityLaw::derivative(double rho) const {
  if (kind_ == Kind::Affine) return b_;
  const std::size_t n = table_.size();
  const double h = rho_bar_ / double(n - 1);
  if (rho <= 0.0 || rho >= rho_bar_) return 0.0;
  const std::size_t k = std::min(n - 2, std::size_t(rho / h));
  const double s = (rho - k * h) / h;
  const double d00 = 6 * s * s - 6 * s;
  const double d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -6 * s * s + 6 * s;
  const double d11 = 3 * s * s - 2 * s;
  return (d00 * table_[k] + d01 * table_[k + 1]) / h + d10 * slopes_[k] + d11 * slopes_[k + 1];
}

void ViscosityLaw::validate() const {
  if (!(mu_min_ > 0.0)) throw ViscosityBoundError("viscosity law: lower bound must be positive");
  if (mu_max_ < mu_min_) throw ViscosityBoundError("viscosity law: upper bound below lower bound");
  const double tol = 1e-12 * std::max(1.0, mu_max_);
  const int samples = 2000;
  for (int s = 0; s <= samples; ++s) {
    const double rho = rho_bar_ * s / samples;
    const double mu = (*this)(rho);
    if (mu < mu_min_ - tol || mu > mu_max_ + tol)
      throw ViscosityBoundError("viscosity law: mu(" + std::to_string(rho) + ") = " + std::to_string(mu) +
                                " outside declared bounds [" + std::to_string(mu_min_) + ", " +
                                std::to_string(mu_max_) + "]");
  }
}

double outflow_courant(const VectorField& u, double dt) {
  const Grid& g = u.grid();
  const Extents ce = g.cell_extents();
  double worst = 0.0;
  detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index) {
    double out = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const Extents fe = g.face_extents(a);
      const Index lo = fe(c);
      const auto& comp = u.component(a);
      out += (std::max(0.0, comp[lo + fe.stride(a)]) + std::max(0.0, -comp[lo])) / g.spacing(a);
    }
    worst = std::max(worst, out * dt);
  });
  return worst;
}

namespace {

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace

ScalarField advect_density(const ScalarField& rho, const VectorField& u, double dt,
                           AdvectionScheme scheme) {
  require_same_grid(rho, u, "advect_density");
  const double limit = scheme == AdvectionScheme::Upwind ? 1.0 : 0.5;
  const double courant = outflow_courant(u, dt);
  if (courant > limit * (1.0 + 1e-12))
    throw StabilityError("advect_density: outflow Courant number " + std::to_string(courant) +
                         " exceeds " + std::to_string(limit));
  const Grid& g = rho.grid();
  const Extents ce = g.cell_extents();
  const auto& r = rho.values();
  ScalarField out = rho;
  for (int a = 0; a < g.dim(); ++a) {
    const Extents fe = g.face_extents(a);
    const int n = g.cells(a);
    const Index cs = ce.stride(a);
    const auto& comp = u.component(a);
    SampleArray<double> flux = SampleArray<double>::Zero(fe.size());
    detail::for_each_sample(fe, [&](std::array<int, 3> c, Index idx) {
      const int i = c[a];
      if (i == 0 || i == n) return;
      const double v = comp[idx];
      const Index right = ce(c);
      const Index left = right - cs;
      double face_rho;
      if (v >= 0.0) {
        face_rho = r[left];
        if (scheme == AdvectionScheme::Muscl && i >= 2)
          face_rho += 0.5 * minmod(r[left] - r[left - cs], r[right] - r[left]);
      } else {
        face_rho = r[right];
        if (scheme == AdvectionScheme::Muscl && i <= n - 2)
          face_rho -= 0.5 * minmod(r[right] - r[left], r[right + cs] - r[right]);
      }
      flux[idx] = v * face_rho;
    });
    const double factor = dt / g.spacing(a);
    const Index fs = fe.stride(a);
    detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index idx) {
      const Index lo = fe(c);
      out.values()[idx] -= factor * (flux[lo + fs] - flux[lo]);
    });
  }
  return out;
}

ScalarField viscosity_field(const ScalarField& rho, const ViscosityLaw& law, double tol) {
  ScalarField mu(rho.grid());
  const auto& r = rho.values();
  for (Index i = 0; i < r.size(); ++i) {
    if (r[i] < -tol) throw PositivityError("viscosity_field: negative density " + std::to_string(r[i]));
    const double m = law(r[i]);
    if (m < law.mu_min() - tol || m > law.mu_max() + tol)
      throw ViscosityBoundError("viscosity_field: mu = " + std::to_string(m) + " outside declared bounds");
    mu.values()[i] = m;
  }
  return mu;
}

double grad_mu_lq(const ScalarField& rho, const ViscosityLaw& law, double q) {
  if (!(q > 3.0))
    throw DomainError("grad_mu_lq: q must exceed 3 (standing hypothesis grad mu(rho_0) in L^q, q > 3)");
  ScalarField mu(rho.grid());
  mu.values() = rho.values().unaryExpr([&](double v) { return law(v); });
  return gradient_lp_norm(mu, q);
}

MassMoments mass_moments(const ScalarField& rho, double tol) {
  const auto& r = rho.values();
  MassMoments m;
  m.rho_min = r.minCoeff();
  m.rho_max = r.maxCoeff();
  if (m.rho_min < -tol)
    throw PositivityError("mass_moments: density " + std::to_string(m.rho_min) + " below zero");
  m.m0 = r.sum() * rho.grid().cell_volume();
  for (double p : {1.0, 1.5, 3.0, std::numeric_limits<double>::infinity()}) m.lp[p] = lp_norm(rho, p);
  return m;
}

}  // namespace benard
