#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "epm/data.hpp"
#include "epm/distributions.hpp"
#include "epm/latent_counts.hpp"
#include "epm/rng.hpp"

namespace epm {

enum class Variant { epm, cepm, depm };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

/// Hyperparameters of the truncated models. Only the fields relevant to the
/// variant are read: (a, b) for EPM/CEPM, (C1, C2) for CEPM, alphas for DEPM.
struct Hyperparameters {
  Variant variant = Variant::depm;
  double a1 = 1.0, a2 = 1.0;
  double b1 = 1.0, b2 = 1.0;
  double C1 = 1.0, C2 = 1.0;
  double alpha1 = 1.0, alpha2 = 1.0;
  double gamma0 = 1.0, c0 = 1.0;
  double e0 = 0.01, f0 = 0.01;

  /// Variant defaults for an I x J matrix; CEPM takes C1 = I, C2 = J.
  static Hyperparameters defaults(Variant v, int rows, int cols);
  void validate() const;

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

enum class HyperInit {
  as_given,    ///< keep the supplied values
  prior_draw,  ///< draw every free hyperparameter from Gamma(e0, f0)
};

enum class Side { rows, cols };

struct TruncatedState {
  int T = 0;
  Hyperparameters hypers;
  /// U (EPM/CEPM) or column-stochastic phi (DEPM), I x T.
  Eigen::MatrixXd row_factors;
  /// V (EPM/CEPM) or column-stochastic psi (DEPM), J x T.
  Eigen::MatrixXd col_factors;
  Eigen::VectorXd lambda;
  LatentCounts counts;
  Rng rng;

  int rows() const { return static_cast<int>(row_factors.rows()); }
  int cols() const { return static_cast<int>(col_factors.rows()); }
};

/// Draws factors and atom weights from their priors, then runs one count pass.
TruncatedState init_state(const BinaryMatrix& x, int T, const Hyperparameters& hypers, Rng rng,
                          HyperInit init = HyperInit::as_given);

double intensity(const TruncatedState& s, int i, int j);
double link_probability(const TruncatedState& s, int i, int j);

/// ZTP totals at one-entries, partitioned over atoms; zero entries stay zero.
void sample_latent_counts(TruncatedState& s, const BinaryMatrix& x);

void sample_factors_epm(TruncatedState& s, Side side);
void sample_factors_epm(TruncatedState& s);
void sample_factors_depm(TruncatedState& s, Side side);
void sample_factors_depm(TruncatedState& s);
void sample_lambda(TruncatedState& s);

/// b1, b2 (EPM only) and c0 (all variants).
void sample_hyper_rates(TruncatedState& s);
void sample_c0_truncated(TruncatedState& s);

void sample_hyper_shape_epm(TruncatedState& s, Side side);
void sample_hyper_shapes_epm(TruncatedState& s);

/// Unnormalized log weights of the CEPM grid sampler, one per grid point.
std::vector<double> cepm_grid_log_weights(const TruncatedState& s, Side side);
/// Shape values a with 1/(1+a) = 0.01, 0.02, ..., 0.99.
const std::vector<double>& cepm_shape_grid();
void sample_hyper_shape_cepm(TruncatedState& s, Side side);
void sample_hyper_shapes_cepm(TruncatedState& s);

void sample_hyper_alpha_depm(TruncatedState& s, Side side);
void sample_hyper_alphas_depm(TruncatedState& s);

void sample_gamma0_truncated(TruncatedState& s);

/// One full scan. Each shape/concentration update integrates out the factor
/// it governs, so that factor is redrawn right after it:
/// counts, (row shape, row factors), (col shape, col factors),
/// (gamma0, lambda), rates.
void gibbs_sweep(TruncatedState& s, const BinaryMatrix& x);

int count_active_atoms(const TruncatedState& s);

/// log P(x | state) summed over every cell (Bernoulli noisy-OR likelihood).
double log_likelihood(const TruncatedState& s, const BinaryMatrix& x);

}  // namespace epm
