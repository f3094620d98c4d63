#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "benard/stepper.hpp"
#include "benard/transport.hpp"

namespace benard {

inline constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

/// Per-output-time quantities. Columns needing a previous state are NaN
/// when none was supplied.
struct LedgerRow {
  double t = 0.0;
  double E = 0.0;  ///< ||sqrt(rho) u||^2 + ||sqrt(rho) theta||^2
  double D = 0.0;  ///< int 2 mu |D(u)|^2 + kappa |grad theta|^2
  double B = 0.0;  ///< 2 int rho u_3 theta
  double grad_u_l2 = 0.0;
  double grad_theta_l2 = 0.0;
  double grad_u_linf = 0.0;
  double grad_mu_lq = 0.0;
  double sq_rho_ut_l2 = kNone;
  double sq_rho_thetat_l2 = kNone;
  double grad_rho_l2 = 0.0;
  double rho_t_l32 = 0.0;
  double mass_l1 = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double c1_ratio = 0.0;
  double u_h2 = 0.0;
  double theta_h2 = 0.0;
};

inline constexpr const char* kLedgerHeader =
    "t,E,D,B,grad_u_l2,grad_theta_l2,grad_u_linf,grad_mu_lq,sq_rho_ut_l2,sq_rho_thetat_l2,"
    "grad_rho_l2,rho_t_l32,mass_l1,rho_min,rho_max,c1_ratio,u_h2,theta_h2";

struct RateParams {
  double mu_lower = 1.0;
  double kappa = 1.0;
  double rho_bar = 1.0;
  double diameter = 1.0;
  double sigma = 0.0;
  double C1 = 1.0;
  double m0 = 0.0;
  double threshold = 0.0;  ///< mu_lower kappa / (C1^2 rho_bar^(2/3))
  double q = 4.0;

  static double zeta(double t) { return t < 1.0 ? t : 1.0; }
};

/// sigma = min(mu_lower, kappa) / (2 rho_bar d^2) and the mass threshold.
/// Every input must be positive.
RateParams sigma_and_threshold(double mu_lower, double kappa, double rho_bar, double diameter, double C1);

struct Slack {
  double absolute = 1e-8;
  double relative = 1e-10;
};

struct Verdict {
  std::string name;
  bool holds = true;
  double margin = std::numeric_limits<double>::infinity();  ///< >= 0 iff holds
  std::optional<double> first_violation_t;
};

/// `prev` is the state one step earlier (for the u_t, theta_t columns).
LedgerRow ledger_row(const FluidState& state, const FluidState* prev, const ViscosityLaw& law,
                     const RateParams& params, MuAverage average = MuAverage::Arithmetic);

/// r_n = (E_{n+1} - E_n)/dt_n + (D_n + D_{n+1}) - (B_n + B_{n+1}).
std::vector<double> energy_identity_residual(const std::vector<LedgerRow>& rows);
double rms(const std::vector<double>& v);

/// Least-squares slope of -log E over rows with t in [t1, t2].
double fit_decay_rate(const std::vector<LedgerRow>& rows, double t1, double t2);

Verdict monotone_energy_verdict(const std::vector<LedgerRow>& rows, double relative_slack = 1e-10);
Verdict gronwall_mu_verdict(const std::vector<LedgerRow>& rows, const Slack& slack = {});
Verdict decay_rate_verdict(const std::vector<LedgerRow>& rows, const RateParams& params, double factor = 0.9);

struct BootstrapVerdicts {
  Verdict grad_mu_4x;  ///< sup ||grad mu|| <= 4 ||grad mu_0||
  Verdict grad_u4_2m0;  ///< int ||grad u||^4 <= 2 m0^(1/3)
  Verdict grad_mu_2x;  ///< strengthened: factor 2
  Verdict grad_u4_m0;  ///< strengthened: factor 1
};

BootstrapVerdicts bootstrap_monitor(const std::vector<LedgerRow>& rows, const RateParams& params,
                                    double grad_mu_0, const Slack& slack = {});

/// Running sups and integrals of the time-weighted norms, keyed by name,
/// plus a tail test: the second half of the run never exceeds the first.
struct WeightedSeries {
  std::map<std::string, double> values;
  Verdict bounded;
};

WeightedSeries weighted_series(const std::vector<LedgerRow>& rows, const RateParams& params,
                               const Slack& slack = {});

std::string format_row(const LedgerRow& row);
void write_ledger_csv(const std::vector<LedgerRow>& rows, const std::filesystem::path& path);
std::vector<LedgerRow> read_ledger_csv(const std::filesystem::path& path);

std::string format_verdict(const Verdict& v);
void write_verdicts(const std::vector<Verdict>& verdicts, const std::filesystem::path& path);

/// Writes `content` to `path` through a sibling temporary and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace benard
