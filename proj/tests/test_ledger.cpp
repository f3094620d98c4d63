#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "benard/initial.hpp"
#include "benard/ledger.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

const ViscosityLaw kLaw = ViscosityLaw::affine(1.0, 1.0, 1.0);

RateParams params_for(const FluidState& s, double kappa = 1.0) {
  RateParams p = sigma_and_threshold(1.0, kappa, 1.0, s.grid().diameter(), 1.0);
  p.m0 = s.rho.values().sum() * s.grid().cell_volume();
  return p;
}

std::vector<LedgerRow> synthetic(double (*E)(double), int n, double t_end) {
  std::vector<LedgerRow> rows(n);
  for (int i = 0; i < n; ++i) {
    rows[i].t = t_end * i / (n - 1);
    rows[i].E = E(rows[i].t);
  }
  return rows;
}

/// Ledger of a run on `g` with a fixed step, one row per step.
std::vector<LedgerRow> run_rows(FluidState s, const Stepper& stepper, double dt, double t_end, double kappa) {
  const RateParams p = params_for(s, kappa);
  std::vector<LedgerRow> rows{ledger_row(s, nullptr, kLaw, p)};
  const int steps = int(std::lround(t_end / dt));
  for (int n = 0; n < steps; ++n) {
    FluidState next = stepper.step(s, dt).first;
    rows.push_back(ledger_row(next, &s, kLaw, p));
    s = std::move(next);
  }
  return rows;
}

std::filesystem::path scratch(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "benard_ledger_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("sigma and threshold") {
  CHECK(sigma_and_threshold(1.0, 2.0, 1.0, 1.0, 1.0).sigma == 0.5);
  const RateParams sym = sigma_and_threshold(0.7, 0.7, 0.5, 1.0, 1.0);
  CHECK(sym.sigma == doctest::Approx(0.7));
  CHECK(sigma_and_threshold(1.0, 1.0, 1.0, 1.0, 2.0).threshold == 0.25);
  CHECK(sigma_and_threshold(2.0, 3.0, 8.0, 1.0, 1.0).threshold == doctest::Approx(6.0 / 4.0));
  CHECK_THROWS_AS(sigma_and_threshold(0.0, 1.0, 1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(sigma_and_threshold(1.0, 1.0, 1.0, -1.0, 1.0), DomainError);
  CHECK(RateParams::zeta(0.4) == 0.4);
  CHECK(RateParams::zeta(7.0) == 1.0);
}

TEST_CASE("ledger row of the rest state") {
  const Grid g = unit_square(16);
  const FluidState s = FluidState::at_rest(g, 1.0);
  FluidState later = s;
  later.t = 0.1;
  const LedgerRow r = ledger_row(later, &s, kLaw, params_for(s));
  for (double v : {r.E, r.D, r.B, r.grad_u_l2, r.grad_theta_l2, r.grad_u_linf, r.grad_mu_lq, r.sq_rho_ut_l2,
                   r.sq_rho_thetat_l2, r.grad_rho_l2, r.rho_t_l32, r.c1_ratio, r.u_h2, r.theta_h2})
    CHECK(v == 0.0);
  CHECK(r.mass_l1 == doctest::Approx(1.0));
  CHECK(std::isnan(ledger_row(s, nullptr, kLaw, params_for(s)).sq_rho_ut_l2));
  CHECK_THROWS_AS(ledger_row(s, &later, kLaw, params_for(s)), DomainError);
}

TEST_CASE("unit density reduces the weighted energy to plain norms") {
  const Grid g = unit_square(24);
  FluidState s = FluidState::at_rest(g, 1.0);
  s.u = cellular_velocity(g, 1.0);
  const LedgerRow r = ledger_row(s, nullptr, kLaw, params_for(s));
  const double u2 = lp_norm(s.u, 2.0);
  CHECK(r.E == doctest::Approx(u2 * u2).epsilon(1e-14));
}

TEST_CASE("buoyancy coupling of the eigenmode pair") {
  // u_3 = theta = sin(pi x) sin(pi y), rho = 1: B = 2 int theta^2 = 1/2.
  double prev = 0.0;
  for (int n : {32, 64}) {
    const Grid g = unit_square(n);
    FluidState s = FluidState::at_rest(g, 1.0);
    s.theta = eigenmode(g);
    s.u = faces(g, [](int a, double x, double y) { return a == 1 ? std::sin(pi * x) * std::sin(pi * y) : 0.0; },
                VelocityBoundary::NoSlip);
    const double err = std::abs(ledger_row(s, nullptr, kLaw, params_for(s)).B - 0.5);
    CHECK(err < 4.0 / (n * n));
    if (prev > 0.0) CHECK(prev / err > 3.5);
    prev = err;
  }
}

TEST_CASE("c1 ratio is invariant under u -> c u, theta -> c theta") {
  const Grid g = unit_square(24);
  FluidState s = FluidState::at_rest(g, 0.0);
  s.rho = density_blob(g, {0.4, 0.6, 0.0}, 0.2, 1.0, 0.05, 0.02);
  s.u = cellular_velocity(g, 0.7);
  s.theta = temperature_modes(g, 1.0, 3, 2);
  const RateParams p = params_for(s);
  const double base = ledger_row(s, nullptr, kLaw, p).c1_ratio;
  CHECK(base > 0.0);
  for (double c : {1e-3, 5.0, -2.0}) {
    FluidState t = s;
    for (int a = 0; a < 2; ++a) t.u.component(a) *= c;
    t.theta.values() *= c;
    CHECK(ledger_row(t, nullptr, kLaw, p).c1_ratio == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("energy identity residual") {
  std::vector<LedgerRow> zero(5);
  for (int i = 0; i < 5; ++i) zero[i].t = 0.1 * i;
  for (double r : energy_identity_residual(zero)) CHECK(r == 0.0);
  CHECK_THROWS_AS(energy_identity_residual({LedgerRow{}}), DomainError);
  CHECK_THROWS_AS(energy_identity_residual(std::vector<LedgerRow>(2)), DomainError);

  SUBCASE("frozen heat decay: first order in dt") {
    const Grid g = unit_square(32);
    StepConfig cfg;
    cfg.freeze_velocity = true;
    cfg.buoyancy = false;
    cfg.heat_source = false;
    const Stepper stepper(g, kLaw, 1.0, cfg);
    FluidState s = FluidState::at_rest(g, 1.0);
    s.theta = eigenmode(g);
    const double a = rms(energy_identity_residual(run_rows(s, stepper, 2e-3, 0.1, 1.0)));
    const double b = rms(energy_identity_residual(run_rows(s, stepper, 1e-3, 0.1, 1.0)));
    const double c = rms(energy_identity_residual(run_rows(s, stepper, 5e-4, 0.1, 1.0)));
    CHECK(a / b == doctest::Approx(2.0).epsilon(0.1));
    CHECK(b / c == doctest::Approx(2.0).epsilon(0.1));
  }
  SUBCASE("coupled small-mass run") {
    const Grid g = unit_square(16);
    const Stepper stepper(g, kLaw, 1.0, StepConfig{});
    FluidState s = FluidState::at_rest(g, 0.0);
    s.rho = density_blob(g, {0.5, 0.5, 0.0}, 0.15, 1.0, 0.05, 0.02);
    s.u = cellular_velocity(g, 0.15);
    s.theta = temperature_modes(g, 1.0, 2, 7);
    const double a = rms(energy_identity_residual(run_rows(s, stepper, 5e-4, 0.02, 1.0)));
    const double b = rms(energy_identity_residual(run_rows(s, stepper, 2.5e-4, 0.02, 1.0)));
    CHECK(a / b >= 1.8);
  }
}

TEST_CASE("decay rate fit") {
  const auto exact = synthetic([](double t) { return 3.0 * std::exp(-2.0 * t); }, 10, 3.0);
  CHECK(fit_decay_rate(exact, 0.0, 3.0) == doctest::Approx(2.0).epsilon(1e-12));
  const auto flat = synthetic([](double) { return 0.4; }, 10, 3.0);
  CHECK(std::abs(fit_decay_rate(flat, 0.0, 3.0)) < 1e-14);
  const auto wobble = synthetic([](double t) { return std::exp(-2.0 * t) * (1.0 + 0.01 * std::sin(t)); }, 200, 5.0);
  CHECK(fit_decay_rate(wobble, 0.0, 5.0) == doctest::Approx(2.0).epsilon(0.01));
  CHECK_THROWS_AS(fit_decay_rate(exact, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(fit_decay_rate(exact, 10.0, 11.0), DegenerateInputError);
  auto bad = exact;
  bad[4].E = 0.0;
  CHECK_THROWS_AS(fit_decay_rate(bad, 0.0, 3.0), DegenerateInputError);
}

TEST_CASE("monotone energy verdict") {
  const Verdict one = monotone_energy_verdict({LedgerRow{}});
  CHECK(one.holds);
  CHECK(std::isinf(one.margin));
  CHECK(monotone_energy_verdict(synthetic([](double t) { return std::exp(-t); }, 20, 2.0)).holds);

  auto rows = synthetic([](double t) { return std::exp(-t); }, 20, 2.0);
  rows[7].E = rows[6].E * 1.001;
  const Verdict v = monotone_energy_verdict(rows);
  CHECK_FALSE(v.holds);
  CHECK(v.margin < 0.0);
  REQUIRE(v.first_violation_t.has_value());
  CHECK(*v.first_violation_t == rows[7].t);
  // Rounding-level increases are absorbed by the relative slack.
  rows[7].E = rows[6].E * (1 + 1e-12);
  CHECK(monotone_energy_verdict(rows).holds);
}

TEST_CASE("Gronwall verdict") {
  std::vector<LedgerRow> still(4);
  for (int i = 0; i < 4; ++i) {
    still[i].t = i;
    still[i].grad_mu_lq = 2.5;
  }
  CHECK(gronwall_mu_verdict(still).holds);

  std::vector<LedgerRow> flat(4);
  for (int i = 0; i < 4; ++i) flat[i].t = i;
  const Verdict c = gronwall_mu_verdict(flat);
  CHECK(c.holds);
  CHECK(std::isinf(c.margin));

  // grad u_inf = 1 gives the bound g0 e^t; a faster growth breaks it.
  std::vector<LedgerRow> grow(11);
  for (int i = 0; i < 11; ++i) {
    grow[i].t = 0.1 * i;
    grow[i].grad_u_linf = 1.0;
    grow[i].grad_mu_lq = std::exp(0.9 * grow[i].t);
  }
  CHECK(gronwall_mu_verdict(grow).holds);
  for (auto& r : grow) r.grad_mu_lq = std::exp(1.2 * r.t);
  const Verdict v = gronwall_mu_verdict(grow);
  CHECK_FALSE(v.holds);
  CHECK(*v.first_violation_t == doctest::Approx(0.1));
}

TEST_CASE("bootstrap monitor") {
  RateParams p;
  p.m0 = 0.125;  // m0^(1/3) = 1/2
  std::vector<LedgerRow> rest(5);
  for (int i = 0; i < 5; ++i) rest[i].t = i;
  const auto b = bootstrap_monitor(rest, p, 0.0);
  CHECK(b.grad_mu_4x.holds);
  CHECK(std::isinf(b.grad_mu_4x.margin));
  CHECK(b.grad_u4_2m0.holds);
  CHECK(b.grad_u4_m0.holds);
  CHECK(b.grad_u4_m0.margin == doctest::Approx(0.5 + 1e-8));

  // ||grad u|| = 1: the integral is t, crossing m0^(1/3) = 1/2 after t = 0.5.
  std::vector<LedgerRow> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[i].t = 0.5 * i;
    rows[i].grad_u_l2 = 1.0;
    rows[i].grad_mu_lq = 1.0 + i;
  }
  const auto c = bootstrap_monitor(rows, p, 1.0);
  CHECK(c.grad_u4_2m0.holds);
  CHECK_FALSE(c.grad_u4_m0.holds);
  CHECK(*c.grad_u4_m0.first_violation_t == 1.0);
  CHECK(c.grad_mu_4x.holds);
  CHECK_FALSE(c.grad_mu_2x.holds);
  CHECK(*c.grad_mu_2x.first_violation_t == 1.0);
}

TEST_CASE("weighted series") {
  RateParams p;
  p.sigma = 0.5;
  std::vector<LedgerRow> rest(6);
  for (int i = 0; i < 6; ++i) {
    rest[i].t = i;
    rest[i].sq_rho_ut_l2 = i == 0 ? kNone : 0.0;
  }
  const WeightedSeries z = weighted_series(rest, p);
  for (const auto& [k, v] : z.values) CHECK(v == 0.0);
  CHECK(z.bounded.holds);

  auto rows = synthetic([](double t) { return std::exp(-0.5 * t); }, 40, 6.0);
  CHECK(weighted_series(rows, p).values.at("sup_exp_E") == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("CSV and verdict formats") {
  const auto path = scratch("ledger.csv");
  write_ledger_csv({}, path);
  {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == std::string(kLedgerHeader) + "\n");
  }
  CHECK(read_ledger_csv(path).empty());

  std::vector<LedgerRow> rows(2);
  rows[0].t = 0.0;
  rows[0].E = 1.0 / 3.0;
  rows[0].B = -2.0e-300;
  rows[1].t = 0.1;
  rows[1].E = std::nextafter(0.2, 1.0);
  rows[1].sq_rho_ut_l2 = 3.0e17;
  rows[1].c1_ratio = std::numeric_limits<double>::infinity();
  write_ledger_csv(rows, path);
  {
    std::ifstream f(path);
    int lines = 0;
    for (std::string l; std::getline(f, l);) ++lines;
    CHECK(lines == 3);
  }
  const auto back = read_ledger_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].E == rows[0].E);
  CHECK(back[0].B == rows[0].B);
  CHECK(std::isnan(back[0].sq_rho_ut_l2));
  CHECK(back[1].E == rows[1].E);
  CHECK(back[1].sq_rho_ut_l2 == rows[1].sq_rho_ut_l2);
  CHECK(std::isinf(back[1].c1_ratio));
  CHECK(format_row(back[1]) == format_row(rows[1]));

  Verdict v{"gronwall_grad_mu", false, -0.25, 1.5};
  CHECK(format_verdict(v) == "gronwall_grad_mu=false -0.25 1.5");
  CHECK(format_verdict(Verdict{"x", true}) == "x=true inf none");

  std::ofstream(path) << "t,E\n1,2\n";
  CHECK_THROWS_AS(read_ledger_csv(path), IoError);
  CHECK_THROWS_AS(write_ledger_csv(rows, "/proc/no/such/dir/ledger.csv"), IoError);
  std::filesystem::remove_all(path.parent_path());
}
