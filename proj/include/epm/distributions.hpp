#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epm/rng.hpp"

namespace epm {

using count_t = std::int64_t;

/// Gamma parameters in the shape/rate convention: density ∝ x^(shape-1) e^(-rate x).
struct GammaParams {
  double shape;
  double rate;
};

/// Gamma(shape, rate) draw. Draws that would underflow are floored at the
/// smallest normal double so the result is always strictly positive.
double sample_gamma(Rng& rng, GammaParams p);
inline double sample_gamma(Rng& rng, double shape, double rate) {
  return sample_gamma(rng, GammaParams{shape, rate});
}

/// log of a Gamma(shape, 1) draw; accurate for arbitrarily small shapes.
double sample_log_gamma(Rng& rng, double shape);

void sample_dirichlet(Rng& rng, std::span<const double> alphas, std::span<double> out);
std::vector<double> sample_dirichlet(Rng& rng, std::span<const double> alphas);

/// Multinomial(n; weights / sum(weights)). Weights need not be normalized.
void sample_multinomial(Rng& rng, count_t n, std::span<const double> weights,
                        std::span<count_t> out);
std::vector<count_t> sample_multinomial(Rng& rng, count_t n, std::span<const double> weights);

/// Index drawn proportionally to nonnegative weights with the given total.
std::size_t sample_categorical(Rng& rng, std::span<const double> weights, double total);

count_t sample_poisson(Rng& rng, double lambda);

/// Poisson(lambda) conditioned on being at least one.
count_t sample_ztp(Rng& rng, double lambda);

/// Number of occupied tables after n CRP customers at concentration a,
/// drawn as a sum of Bernoulli(a / (a + p - 1)), p = 1..n.
count_t sample_antoniak(Rng& rng, count_t n, double a);

double sample_beta(Rng& rng, double a, double b);
/// log of a Beta(a, b) draw, computed from log-gamma draws.
double sample_log_beta(Rng& rng, double a, double b);

double log_gamma_fn(double x);

/// Smallest positive value any continuous draw is floored to.
inline constexpr double kTiny = 2.2250738585072014e-308;

}  // namespace epm
