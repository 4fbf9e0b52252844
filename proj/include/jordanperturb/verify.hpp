#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jordanperturb/first_order.hpp"
#include "jordanperturb/rational.hpp"
#include "jordanperturb/reduction.hpp"

namespace jordanperturb {

inline constexpr double kDefaultSlack = 0.1;
inline constexpr double kDefaultMinRSquared = 0.98;
inline constexpr double kOracleRadius = 10.0;
inline constexpr double kWeakMargin = 0.02;

// Smallest t at which t^{1/rho} effects are resolvable: 10 eps^{rho/(rho+1)}.
double min_resolvable_t(int rho);

struct SweepPlan {
  std::vector<double> t_values;  // strictly decreasing
  int rho = 1;
  std::vector<RootSelection> roots;  // tracked subspaces; empty tracks every single root
  double slack = kDefaultSlack;
  double min_r_squared = kDefaultMinRSquared;
  double radius_constant = kOracleRadius;
  std::optional<Rational> radius_exponent;  // 1/(rho+1) when unset
  bool order_tables = true;
  bool riccati = true;
  // negative-control hooks
  double h1_noise = 0.0;
  int branch_shift = 0;

  void validate() const;
};

// Geometric sweep from t_max down to t_min, raised to the resolvable limit when needed.
SweepPlan default_plan(int rho, int points = 13, double t_max = 1e-2, double t_min = 1e-8);

struct Sample {
  double x = 0.0;  // t or z
  double error = 0.0;
  double floor = 0.0;  // per-sample floor, combined with FitOptions::floor
};

struct ConvergenceReport {
  std::string quantity;
  std::string variable = "t";
  Rational claimed;
  double min_slope = 0.0;
  double fitted_slope = 0.0;
  double r_squared = 0.0;
  bool pass = false;
  bool floor_limited = false;
  bool weak = false;  // o(.) claim checked as slope > claimed + margin
  std::size_t used = 0;
  std::vector<Sample> samples;
  std::string note;
};

struct FitOptions {
  double slack = kDefaultSlack;
  double min_r_squared = kDefaultMinRSquared;
  double floor = 100.0 * kEps;  // samples below are dropped
  bool weak = false;
  std::string quantity;
  std::string variable = "t";
};

// Least-squares fit of log error against log x. Throws InsufficientSamples when fewer than
// five samples survive the floor.
ConvergenceReport slope_fit(const std::vector<Sample>& samples, Rational claimed,
                            const FitOptions& opts = {});

// Eigenvalues of a + t d within c t^{radius_exponent} of lambda0, sorted by argument.
std::vector<Complex> oracle_eigs(const ComplexMatrix& a, const ComplexMatrix& d, double t,
                                 Complex lambda0, Rational radius_exponent,
                                 double c = kOracleRadius);

struct Matching {
  std::vector<std::size_t> pairing;  // predicted i -> observed pairing[i]
  double max_error = 0.0;
  double cost = 0.0;
};

// Minimum-cost perfect matching; throws CardinalityMismatch on unequal lengths.
Matching match_eigenvalues(const std::vector<Complex>& predicted,
                           const std::vector<Complex>& observed);
// Minimum-cost assignment of every prediction to a distinct observation.
Matching match_into(const std::vector<Complex>& predicted, const std::vector<Complex>& observed);

std::vector<ConvergenceReport> verify_all(const CanonicalPair& pair, int rho,
                                          const SweepPlan& plan);

// General-form problem: eigenvalue and residual reports on the full matrices.
std::vector<ConvergenceReport> verify_general(const ReducedProblem& red, const ComplexMatrix& a,
                                              const ComplexMatrix& d, int rho,
                                              const SweepPlan& plan);

bool all_pass(const std::vector<ConvergenceReport>& reports);

// Worker count for sweeps: JORDANPERTURB_THREADS when set, else hardware concurrency.
unsigned sweep_threads(std::size_t points);

}  // namespace jordanperturb
