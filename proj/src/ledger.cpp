#include "benard/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "benard/error.hpp"
#include "benard/operators.hpp"

namespace benard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// vol * sum over faces of w_f v_f^2, with w the face-averaged density.
double face_weighted_sq(const VectorField& v, const ScalarField& rho) {
  const Grid& g = v.grid();
  double acc = 0.0;
  for (int a = 0; a < g.dim(); ++a)
    acc += (face_average(rho, a) * v.component(a).square()).sum();
  return acc * g.cell_volume();
}

double cell_weighted_sq(const SampleArray<double>& v, const ScalarField& rho, double vol) {
  return (rho.values() * v.square()).sum() * vol;
}

Verdict named(std::string name) {
  Verdict v;
  v.name = std::move(name);
  return v;
}

void note_violation(Verdict& v, double margin, double t) {
  if (margin < v.margin) v.margin = margin;
  if (margin < 0.0) {
    if (v.holds) v.first_violation_t = t;
    v.holds = false;
  }
}

/// value <= bound up to slack. The exact case 0 <= 0 (constant density) keeps
/// the +inf margin.
void check_bound(Verdict& v, double value, double bound, const Slack& slack, double t) {
  if (value == 0.0 && bound == 0.0) return;
  note_violation(v, bound + slack.absolute + slack.relative * bound - value, t);
}

std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RateParams sigma_and_threshold(double mu_lower, double kappa, double rho_bar, double diameter, double C1) {
  for (auto [name, v] : {std::pair{"mu_lower", mu_lower}, {"kappa", kappa}, {"rho_bar", rho_bar},
                         {"diameter", diameter}, {"C1", C1}})
    if (!(v > 0.0)) throw DomainError(std::string("sigma_and_threshold: ") + name + " must be positive");
  RateParams p;
  p.mu_lower = mu_lower;
  p.kappa = kappa;
  p.rho_bar = rho_bar;
  p.diameter = diameter;
  p.C1 = C1;
  p.sigma = std::min(mu_lower, kappa) / (2.0 * rho_bar * diameter * diameter);
  p.threshold = mu_lower * kappa / (C1 * C1 * std::cbrt(rho_bar * rho_bar));
  return p;
}

LedgerRow ledger_row(const FluidState& s, const FluidState* prev, const ViscosityLaw& law,
                     const RateParams& params, MuAverage average) {
  const Grid& g = s.grid();
  const double vol = g.cell_volume();
  const int e3 = g.vertical_axis();
  LedgerRow r;
  r.t = s.t;

  r.E = face_weighted_sq(s.u, s.rho) + cell_weighted_sq(s.theta.values(), s.rho, vol);

  const ScalarField mu = viscosity_field(s.rho, law);
  r.grad_theta_l2 = gradient_lp_norm(s.theta, 2.0);
  r.D = deformation_dissipation(s.u, mu, average) + params.kappa * r.grad_theta_l2 * r.grad_theta_l2;
  r.B = 2.0 * vol * (s.rho.values() * s.theta.values() * cell_average(s.u, e3)).sum();

  const VelocityGradient du = velocity_gradient(s.u);
  r.grad_u_l2 = lp_norm(du, 2.0);
  r.grad_u_linf = lp_norm(du, kInf);
  r.grad_mu_lq = grad_mu_lq(s.rho, law, params.q);

  if (prev) {
    const double dt = s.t - prev->t;
    if (!(dt > 0.0)) throw DomainError("ledger_row: previous state is not earlier");
    VectorField du_t = s.u;
    for (int a = 0; a < g.dim(); ++a) du_t.component(a) -= prev->u.component(a);
    r.sq_rho_ut_l2 = std::sqrt(face_weighted_sq(du_t, s.rho)) / dt;
    r.sq_rho_thetat_l2 =
        std::sqrt(cell_weighted_sq(s.theta.values() - prev->theta.values(), s.rho, vol)) / dt;
  }

  // rho_t = -u . grad rho, with both factors brought to cell centers.
  const VectorField grad_rho = gradient(s.rho);
  r.grad_rho_l2 = lp_norm(grad_rho, 2.0);
  ScalarField rho_t(g);
  for (int a = 0; a < g.dim(); ++a) {
    const Extents ce = g.cell_extents();
    const Extents fe = g.face_extents(a);
    const auto& ga = grad_rho.component(a);
    const auto ua = cell_average(s.u, a);
    detail::for_each_sample(ce, [&](const std::array<int, 3>& c, Index idx) {
      std::array<int, 3> hi = c;
      hi[a] += 1;
      rho_t.values()[idx] -= ua[idx] * 0.5 * (ga[fe(c)] + ga[fe(hi)]);
    });
  }
  r.rho_t_l32 = lp_norm(rho_t, 1.5);

  const MassMoments mm = mass_moments(s.rho);
  r.mass_l1 = mm.lp.at(1.0);
  r.rho_min = mm.rho_min;
  r.rho_max = mm.rho_max;

  const double denom = std::cbrt(params.rho_bar) * std::pow(params.m0, 2.0 / 3.0) * r.grad_u_l2 * r.grad_theta_l2;
  r.c1_ratio = denom > 0.0 ? std::abs(r.B) / denom : 0.0;

  r.u_h2 = h2_norm(s.u);
  r.theta_h2 = h2_norm(s.theta);
  return r;
}

std::vector<double> energy_identity_residual(const std::vector<LedgerRow>& rows) {
  if (rows.size() < 2) throw DomainError("energy_identity_residual: need at least two rows");
  std::vector<double> out;
  out.reserve(rows.size() - 1);
  for (std::size_t n = 0; n + 1 < rows.size(); ++n) {
    const auto& a = rows[n];
    const auto& b = rows[n + 1];
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) throw DomainError("energy_identity_residual: times must increase");
    out.push_back((b.E - a.E) / dt + (a.D + b.D) - (a.B + b.B));
  }
  return out;
}

double rms(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / double(v.size()));
}

double fit_decay_rate(const std::vector<LedgerRow>& rows, double t1, double t2) {
  if (!(t2 > t1)) throw DomainError("fit_decay_rate: empty window");
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (const auto& r : rows) {
    if (r.t < t1 || r.t > t2) continue;
    if (!(r.E > 0.0)) throw DegenerateInputError("fit_decay_rate: E <= 0 at t = " + fmt17(r.t));
    const double y = -std::log(r.E);
    n += 1;
    st += r.t;
    sy += y;
    stt += r.t * r.t;
    sty += r.t * y;
  }
  if (n < 2) throw DegenerateInputError("fit_decay_rate: fewer than two rows in the window");
  const double det = n * stt - st * st;
  if (!(det > 0.0)) throw DegenerateInputError("fit_decay_rate: rows share one time");
  return (n * sty - st * sy) / det;
}

Verdict monotone_energy_verdict(const std::vector<LedgerRow>& rows, double relative_slack) {
  Verdict v = named("monotone_energy");
  for (std::size_t n = 0; n + 1 < rows.size(); ++n) {
    const double Ea = rows[n].E;
    const double Eb = rows[n + 1].E;
    const double allowed = Ea * (1.0 + relative_slack);
    const double scale = Ea > 0.0 ? Ea : 1.0;
    note_violation(v, (allowed - Eb) / scale, rows[n + 1].t);
  }
  return v;
}

Verdict gronwall_mu_verdict(const std::vector<LedgerRow>& rows, const Slack& slack) {
  Verdict v = named("gronwall_grad_mu");
  if (rows.empty()) return v;
  const double g0 = rows.front().grad_mu_lq;
  double integral = 0.0;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    if (n > 0)
      integral += 0.5 * (rows[n].t - rows[n - 1].t) * (rows[n].grad_u_linf + rows[n - 1].grad_u_linf);
    check_bound(v, rows[n].grad_mu_lq, g0 * std::exp(integral), slack, rows[n].t);
  }
  return v;
}

Verdict decay_rate_verdict(const std::vector<LedgerRow>& rows, const RateParams& params, double factor) {
  Verdict v = named("decay_rate");
  if (rows.size() < 2) return v;
  const double T = rows.back().t;
  const double t1 = RateParams::zeta(T);
  double rate;
  try {
    rate = fit_decay_rate(rows, t1, T);
  } catch (const DegenerateInputError&) {
    v.holds = false;
    v.margin = -kInf;
    v.first_violation_t = T;
    return v;
  }
  note_violation(v, rate - factor * params.sigma, T);
  return v;
}

BootstrapVerdicts bootstrap_monitor(const std::vector<LedgerRow>& rows, const RateParams& params,
                                    double grad_mu_0, const Slack& slack) {
  BootstrapVerdicts out{named("bootstrap_grad_mu_4x"), named("bootstrap_grad_u4_2m0"),
                        named("bootstrap_grad_mu_2x"), named("bootstrap_grad_u4_m0")};
  const double m13 = std::cbrt(params.m0);
  double integral = 0.0;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const auto& r = rows[n];
    if (n > 0) {
      const double a = rows[n - 1].grad_u_l2, b = r.grad_u_l2;
      integral += 0.5 * (r.t - rows[n - 1].t) * (a * a * a * a + b * b * b * b);
    }
    check_bound(out.grad_mu_4x, r.grad_mu_lq, 4.0 * grad_mu_0, slack, r.t);
    check_bound(out.grad_mu_2x, r.grad_mu_lq, 2.0 * grad_mu_0, slack, r.t);
    check_bound(out.grad_u4_2m0, integral, 2.0 * m13, slack, r.t);
    check_bound(out.grad_u4_m0, integral, m13, slack, r.t);
  }
  return out;
}

WeightedSeries weighted_series(const std::vector<LedgerRow>& rows, const RateParams& params, const Slack& slack) {
  WeightedSeries out;
  out.bounded.name = "weighted_series_bounded";
  const double T = rows.empty() ? 0.0 : rows.back().t;
  const double zeta = RateParams::zeta(T);
  const double half = 0.5 * T;
  const double s = params.sigma;

  // Each series: sup over [0, T/2] and sup over (T/2, T].
  struct Sup {
    double first = 0.0, second = 0.0;
    void add(double t, double x, double half_t) {
      if (t <= half_t) first = std::max(first, x);
      else second = std::max(second, x);
    }
    double all() const { return std::max(first, second); }
  };
  Sup t1g, t2g, expE, expUt;
  double integral = 0.0, int_first = 0.0;
  double prev_t = 0.0, prev_w = 0.0;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const auto& r = rows[n];
    const double g2 = r.grad_u_l2 * r.grad_u_l2 + r.grad_theta_l2 * r.grad_theta_l2;
    const double e = std::exp(s * r.t);
    t1g.add(r.t, r.t * g2, half);
    t2g.add(r.t, r.t * r.t * g2, half);
    expE.add(r.t, e * r.E, half);
    if (r.t >= zeta && !std::isnan(r.sq_rho_ut_l2) && !std::isnan(r.sq_rho_thetat_l2))
      expUt.add(r.t, e * (r.sq_rho_ut_l2 * r.sq_rho_ut_l2 + r.sq_rho_thetat_l2 * r.sq_rho_thetat_l2), half);
    const double w = e * g2;
    if (n > 0) integral += 0.5 * (r.t - prev_t) * (w + prev_w);
    if (r.t <= half) int_first = integral;
    prev_t = r.t;
    prev_w = w;
  }
  out.values["sup_t_grad"] = t1g.all();
  out.values["sup_t2_grad"] = t2g.all();
  out.values["sup_exp_E"] = expE.all();
  out.values["sup_exp_ut"] = expUt.all();
  out.values["int_exp_grad"] = integral;

  auto tail = [&](double first, double second) {
    note_violation(out.bounded, first + slack.absolute + slack.relative * first - second, T);
  };
  tail(t1g.first, t1g.second);
  tail(t2g.first, t2g.second);
  tail(expE.first, expE.second);
  tail(int_first, integral - int_first);
  for (const auto& [k, x] : out.values)
    if (!std::isfinite(x)) note_violation(out.bounded, -kInf, T);
  return out;
}

std::string format_row(const LedgerRow& r) {
  const double cols[] = {r.t,        r.E,         r.D,          r.B,          r.grad_u_l2,
                         r.grad_theta_l2, r.grad_u_linf, r.grad_mu_lq, r.sq_rho_ut_l2, r.sq_rho_thetat_l2,
                         r.grad_rho_l2, r.rho_t_l32, r.mass_l1,    r.rho_min,    r.rho_max,
                         r.c1_ratio,   r.u_h2,      r.theta_h2};
  std::string line;
  for (std::size_t i = 0; i < std::size(cols); ++i) {
    if (i) line += ',';
    line += fmt17(cols[i]);
  }
  return line;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os << content;
    if (!os) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_ledger_csv(const std::vector<LedgerRow>& rows, const std::filesystem::path& path) {
  std::string out = kLedgerHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += format_row(r);
    out += '\n';
  }
  write_atomic(path, out);
}

std::vector<LedgerRow> read_ledger_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != kLedgerHeader) throw IoError(path.string() + ": unexpected header");
  std::vector<LedgerRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
    if (v.size() != 18) throw IoError(path.string() + ": row with " + std::to_string(v.size()) + " columns");
    LedgerRow r;
    double* dst[] = {&r.t,        &r.E,         &r.D,          &r.B,          &r.grad_u_l2,
                     &r.grad_theta_l2, &r.grad_u_linf, &r.grad_mu_lq, &r.sq_rho_ut_l2, &r.sq_rho_thetat_l2,
                     &r.grad_rho_l2, &r.rho_t_l32, &r.mass_l1,    &r.rho_min,    &r.rho_max,
                     &r.c1_ratio,   &r.u_h2,      &r.theta_h2};
    for (std::size_t i = 0; i < 18; ++i) *dst[i] = v[i];
    rows.push_back(r);
  }
  return rows;
}

std::string format_verdict(const Verdict& v) {
  return v.name + '=' + (v.holds ? "true" : "false") + ' ' + fmt17(v.margin) + ' ' +
         (v.first_violation_t ? fmt17(*v.first_violation_t) : std::string("none"));
}

void write_verdicts(const std::vector<Verdict>& verdicts, const std::filesystem::path& path) {
  std::string out;
  for (const auto& v : verdicts) out += format_verdict(v) + '\n';
  write_atomic(path, out);
}

}  // namespace benard
