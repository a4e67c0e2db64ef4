#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "epm/marginal.hpp"
#include "epm/rng.hpp"

namespace epm {

/// Analytic value against a Monte Carlo estimate; passes iff the gap is
/// within `tolerance_se` standard errors.
struct ExpectationCheck {
  std::string name;
  double analytic = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  std::int64_t n = 0;
  double tolerance_se = 3.0;
  bool pass = false;

  double z() const { return se > 0.0 ? (estimate - analytic) / se : 0.0; }
};

ExpectationCheck make_check(std::string name, double analytic, double estimate, double se,
                            std::int64_t n, double tolerance_se = 3.0);

struct EpmPrior {
  double a1 = 1.0, b1 = 1.0;
  double a2 = 1.0, b2 = 1.0;
  double gamma0 = 1.0, c0 = 1.0;
  int T = 1000;
};

/// Atoms lighter than kNegligibleWeight / c0 are dropped from the Monte Carlo
/// intensity sums. The dropped mass is at most this fraction of the mean.
inline constexpr double kNegligibleWeight = 1e-6;

/// Average of sum_k U_1k V_1k lambda_k over n prior draws against
/// (a1/b1)(a2/b2)(gamma0/c0).
ExpectationCheck mc_intensity_expectation_epm(const EpmPrior& prior, std::int64_t n, Rng& rng);

/// Average of sum_k phi_1k psi_1k lambda_k over n prior draws of the
/// Dirichlet model against gamma0/(I J c0).
ExpectationCheck mc_intensity_expectation_depm(int rows, int cols, double gamma0, double c0,
                                               std::int64_t n, Rng& rng, int T = 1000,
                                               double alpha1 = 1.0, double alpha2 = 1.0);

/// Prior-integration check of the truncated marginal: averages the fully
/// factorized likelihood of the labelled counts over n prior draws of
/// (phi, psi, lambda) at truncation T and compares to the closed form.
ExpectationCheck verify_marginal_by_prior_mc(const CountTable& table, int T,
                                             const IdepmHypers& hypers, std::int64_t n, Rng& rng);

struct LimitPoint {
  std::int64_t T;
  double log_p;
  double abs_error;
};

struct LimitReport {
  double log_p_infinite = 0.0;
  std::vector<LimitPoint> ladder;
  bool monotone = false;
  double final_error = 0.0;
  bool pass = false;  // monotone and final error below the tolerance
};

LimitReport verify_partition_limit(const CountTable& table, const IdepmHypers& hypers,
                                   const std::vector<std::int64_t>& ladder = {100, 1000, 10000,
                                                                              100000, 1000000},
                                   double tolerance = 1e-6);

/// One monitored quantity of a Geweke run: its sample mean and mean squared
/// deviation compared to their prior values, with batch-means standard errors.
struct GewekeStat {
  std::string name;
  double prior_mean = 0.0;
  double prior_var = 0.0;
  double sample_mean = 0.0;
  double sample_var = 0.0;
  double z_mean = 0.0;
  double z_var = 0.0;
};

struct GewekeOptions {
  int rows = 3;
  int cols = 3;
  int T = 2;
  std::int64_t rounds = 100000;
  int batches = 50;
  double e0 = 3.0;
  double f0 = 3.0;
  /// Replaces the c0 update with one whose gamma rate is doubled.
  bool corrupt = false;
  double z_limit = 4.0;
};

struct GewekeReport {
  std::string model;
  GewekeOptions options;
  std::vector<GewekeStat> stats;
  double max_abs_z = 0.0;
  bool pass = false;
};

/// Successive-conditional simulation: regenerate data from the current
/// parameters, then apply one sampler transition. Model is epm, cepm, depm or
/// idepm. Parameters are monitored through their probability integral
/// transform given their parent hyperparameters (uniform under the prior).
GewekeReport geweke_joint_test(const std::string& model, const GewekeOptions& options, Rng& rng);

/// `settings` randomized priors for each of the EPM and DEPM intensity
/// expectations, n draws per check.
std::vector<ExpectationCheck> expectation_suite(std::int64_t n, Rng& rng, int settings = 5);

/// ZTP and Antoniak sample means against their closed forms, three settings each.
std::vector<ExpectationCheck> moment_suite(std::int64_t n, Rng& rng);

struct MarginalSuite {
  std::vector<ExpectationCheck> prior_mc;
  std::vector<std::pair<std::string, LimitReport>> limits;
  double hand_log_p = 0.0;
  double hand_error = 0.0;
  bool hand_pass = false;

  bool pass() const;
};

/// Prior integration on three tiny tables (n draws each), the partition
/// limit on two tables, and the single-customer case against ln(1/4).
MarginalSuite marginal_suite(std::int64_t n, Rng& rng);
void write_marginal_text(std::ostream& out, const MarginalSuite& m);

/// epm, depm and idepm on the default 3 x 3, T = 2 shape.
std::vector<GewekeReport> geweke_suite(std::int64_t rounds, bool corrupt, Rng& rng);

void write_checks_csv(std::ostream& out, const std::vector<ExpectationCheck>& checks);
void write_checks_text(std::ostream& out, const std::vector<ExpectationCheck>& checks);
void write_limit_text(std::ostream& out, const std::string& name, const LimitReport& r);
void write_geweke_csv(std::ostream& out, const std::vector<GewekeReport>& reports);
void write_geweke_text(std::ostream& out, const GewekeReport& r);

}  // namespace epm
