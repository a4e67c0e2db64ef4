#include "epm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace epm {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double log_add_exp(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

double sample_log_gamma(Rng& rng, double shape) {
  require(positive_finite(shape), "gamma: shape must be positive and finite");
  if (shape >= 1.0) return std::log(rng.gamma_unit(shape));
  // Gamma(a) = Gamma(a + 1) * U^(1/a), kept in log space.
  return std::log(rng.gamma_unit(shape + 1.0)) + std::log(rng.uniform()) / shape;
}

double sample_gamma(Rng& rng, GammaParams p) {
  require(positive_finite(p.shape) && positive_finite(p.rate),
          "gamma: shape and rate must be positive and finite");
  double x;
  if (p.shape >= 1.0) {
    x = rng.gamma_unit(p.shape) / p.rate;
  } else {
    x = std::exp(sample_log_gamma(rng, p.shape) - std::log(p.rate));
  }
  return std::max(x, kTiny);
}

void sample_dirichlet(Rng& rng, std::span<const double> alphas, std::span<double> out) {
  require(!alphas.empty(), "dirichlet: empty parameter vector");
  require(out.size() == alphas.size(), "dirichlet: output size mismatch");
  for (double a : alphas) require(positive_finite(a), "dirichlet: alphas must be positive");
  if (alphas.size() == 1) {
    out[0] = 1.0;
    return;
  }
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    out[i] = sample_log_gamma(rng, alphas[i]);
    hi = std::max(hi, out[i]);
  }
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - hi);
    total += v;
  }
  for (double& v : out) v = std::max(v / total, kTiny);
}

std::vector<double> sample_dirichlet(Rng& rng, std::span<const double> alphas) {
  std::vector<double> out(alphas.size());
  sample_dirichlet(rng, alphas, out);
  return out;
}

std::size_t sample_categorical(Rng& rng, std::span<const double> weights, double total) {
  double u = rng.uniform() * total;
  std::size_t last = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    last = k;
    if (u < weights[k]) return k;
    u -= weights[k];
  }
  return last;  // rounding fell off the end
}

void sample_multinomial(Rng& rng, count_t n, std::span<const double> weights,
                        std::span<count_t> out) {
  require(n >= 0, "multinomial: negative trial count");
  require(out.size() == weights.size(), "multinomial: output size mismatch");
  std::fill(out.begin(), out.end(), 0);
  if (n == 0) return;
  double total = 0.0;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, "multinomial: weights must be finite and nonnegative");
    total += w;
  }
  require(total > 0.0, "multinomial: all weights are zero");

  if (n <= 16) {
    for (count_t t = 0; t < n; ++t) ++out[sample_categorical(rng, weights, total)];
    return;
  }
  count_t left = n;
  double mass = total;
  for (std::size_t k = 0; k < weights.size() && left > 0; ++k) {
    if (weights[k] <= 0.0) continue;
    const double p = std::min(1.0, weights[k] / mass);
    count_t draw = left;
    if (p < 1.0) {
      std::binomial_distribution<count_t> binom(left, p);
      draw = binom(rng.engine());
    }
    out[k] = draw;
    left -= draw;
    mass -= weights[k];
  }
  if (left > 0) {
    // mass rounding left a remainder; it belongs to the last positive category
    for (std::size_t k = weights.size(); k-- > 0;) {
      if (weights[k] > 0.0) {
        out[k] += left;
        break;
      }
    }
  }
}

std::vector<count_t> sample_multinomial(Rng& rng, count_t n, std::span<const double> weights) {
  std::vector<count_t> out(weights.size());
  sample_multinomial(rng, n, weights, out);
  return out;
}

count_t sample_poisson(Rng& rng, double lambda) {
  require(std::isfinite(lambda) && lambda >= 0.0, "poisson: rate must be finite and nonnegative");
  if (lambda == 0.0) return 0;
  std::poisson_distribution<count_t> pois(lambda);
  return pois(rng.engine());
}

count_t sample_ztp(Rng& rng, double lambda) {
  require(positive_finite(lambda), "ztp: rate must be positive and finite");
  if (lambda >= 10.0) {
    for (;;) {
      const count_t k = sample_poisson(rng, lambda);
      if (k >= 1) return k;
    }
  }
  // Inverse CDF over the truncated pmf.
  const double target = rng.uniform() * -std::expm1(-lambda);
  double p = lambda * std::exp(-lambda);
  double cum = p;
  count_t k = 1;
  while (cum < target) {
    ++k;
    p *= lambda / static_cast<double>(k);
    if (p <= 0.0) break;
    cum += p;
  }
  return k;
}

count_t sample_antoniak(Rng& rng, count_t n, double a) {
  require(positive_finite(a), "antoniak: concentration must be positive");
  require(n >= 0, "antoniak: negative customer count");
  count_t tables = 0;
  for (count_t p = 1; p <= n; ++p) {
    if (rng.uniform() * (a + static_cast<double>(p - 1)) < a) ++tables;
  }
  return tables;
}

double sample_log_beta(Rng& rng, double a, double b) {
  require(positive_finite(a) && positive_finite(b), "beta: parameters must be positive");
  const double la = sample_log_gamma(rng, a);
  const double lb = sample_log_gamma(rng, b);
  return la - log_add_exp(la, lb);
}

double sample_beta(Rng& rng, double a, double b) {
  if (a >= 1.0 && b >= 1.0) {
    const double x = rng.gamma_unit(a), y = rng.gamma_unit(b);
    return std::clamp(x / (x + y), kTiny, std::nextafter(1.0, 0.0));
  }
  const double v = std::exp(sample_log_beta(rng, a, b));
  return std::clamp(v, kTiny, std::nextafter(1.0, 0.0));
}

double log_gamma_fn(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("log_gamma: argument must be positive");
#if defined(__GLIBC__)
  int sign;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

}  // namespace epm
