#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "benard/fields.hpp"

namespace benard {

/// One evaluation of a functional inequality on a concrete field.
struct InequalityProbeResult {
  double ratio = 0.0;
  std::optional<double> bound;  ///< empty: no constant is claimed
  bool satisfied = true;
  std::string field;
};

/// ||f||_2 / ||grad f||_2 against the claimed constant d (box diameter).
/// Requires a Dirichlet-zero field that is not identically zero.
InequalityProbeResult poincare_ratio(const ScalarField& f, std::string descriptor = {});

/// ||f||_p / (||f||_2^{(6-p)/(2p)} ||grad f||_2^{(3p-6)/(2p)}) for p in [2, 6].
/// No constant is claimed; callers track the running maximum.
InequalityProbeResult gn_ratio(const ScalarField& f, double p, std::string descriptor = {});

/// Exponents (a, b) of ||f||_2^a ||grad f||_2^b in the interpolation bound.
std::pair<double, double> gn_exponents(double p);

/// Sum of products of sine modes sin(k pi x / L) with fixed coefficients.
/// Vanishes on every wall, so samples are Dirichlet-zero fields.
struct SineModeField {
  int dim = 2;
  int max_mode = 1;
  std::vector<double> coefficients;  ///< max_mode^dim entries, axis 0 fastest

  double evaluate(const Grid& grid, double x, double y, double z) const;
  ScalarField sample(const Grid& grid) const;
};

/// Coefficients c_k ~ N(0, 1) / (k0 k1 k2), drawn from `rng`.
SineModeField random_sine_modes(std::mt19937_64& rng, int dim, int max_mode);

/// Aggregate of the seeded probe family.
struct ProbeSuiteResult {
  int fields = 0;
  double max_poincare = 0.0;
  bool poincare_all_satisfied = true;
  double gn2_max_deviation = 0.0;          ///< max |ratio - 1| at p = 2
  std::map<double, double> gn_max;         ///< empirical constant per p
  std::map<double, std::vector<double>> gn_ratios;  ///< per field, per p
};

ProbeSuiteResult run_probe_suite(const Grid& grid, int count, std::uint64_t seed,
                                 const std::vector<double>& exponents, int max_mode = 3);

}  // namespace benard
