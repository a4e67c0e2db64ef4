#include "epm/truncated.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace epm {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::epm: return "epm";
    case Variant::cepm: return "cepm";
    case Variant::depm: return "depm";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  if (name == "epm") return Variant::epm;
  if (name == "cepm") return Variant::cepm;
  if (name == "depm") return Variant::depm;
  throw std::invalid_argument("unknown truncated model '" + name + "'");
}

Hyperparameters Hyperparameters::defaults(Variant v, int rows, int cols) {
  Hyperparameters h;
  h.variant = v;
  if (v == Variant::cepm) {
    h.C1 = rows;
    h.C2 = cols;
    h.b1 = h.C1 * h.a1;
    h.b2 = h.C2 * h.a2;
  }
  return h;
}

void Hyperparameters::validate() const {
  for (double v : {a1, a2, b1, b2, C1, C2, alpha1, alpha2, gamma0, c0, e0, f0}) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw std::invalid_argument("hyperparameters must be positive and finite");
    }
  }
}

namespace {

constexpr double kIntensityFloor = 1e-300;

double draw_prior(Rng& rng, const Hyperparameters& h) { return sample_gamma(rng, h.e0, h.f0); }

void enforce_cepm(Hyperparameters& h) {
  h.b1 = h.C1 * h.a1;
  h.b2 = h.C2 * h.a2;
}

// Per-atom weights for one edge; falls back to log space when the products underflow.
double edge_weights(const TruncatedState& s, int i, int j, std::vector<double>& w) {
  const int T = s.T;
  w.resize(static_cast<std::size_t>(T));
  double total = 0.0;
  for (int k = 0; k < T; ++k) {
    w[k] = s.row_factors(i, k) * s.col_factors(j, k) * s.lambda[k];
    total += w[k];
  }
  if (total >= std::numeric_limits<double>::min()) return total;
  double hi = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < T; ++k) {
    w[k] = std::log(s.row_factors(i, k)) + std::log(s.col_factors(j, k)) + std::log(s.lambda[k]);
    hi = std::max(hi, w[k]);
  }
  for (double& v : w) v = std::exp(v - hi);
  return total;
}

}  // namespace

TruncatedState init_state(const BinaryMatrix& x, int T, const Hyperparameters& hypers, Rng rng,
                          HyperInit init) {
  if (T < 1) throw std::invalid_argument("init: truncation level must be at least 1");
  TruncatedState s;
  s.T = T;
  s.hypers = hypers;
  s.rng = std::move(rng);
  auto& h = s.hypers;
  if (init == HyperInit::prior_draw) {
    h.gamma0 = draw_prior(s.rng, h);
    h.c0 = draw_prior(s.rng, h);
    if (h.variant == Variant::depm) {
      h.alpha1 = draw_prior(s.rng, h);
      h.alpha2 = draw_prior(s.rng, h);
    } else {
      h.a1 = draw_prior(s.rng, h);
      h.a2 = draw_prior(s.rng, h);
      if (h.variant == Variant::epm) {
        h.b1 = draw_prior(s.rng, h);
        h.b2 = draw_prior(s.rng, h);
      }
    }
  }
  if (h.variant == Variant::cepm) enforce_cepm(h);
  h.validate();

  const int I = x.rows(), J = x.cols();
  s.row_factors.resize(I, T);
  s.col_factors.resize(J, T);
  s.lambda.resize(T);
  if (h.variant == Variant::depm) {
    std::vector<double> a1(static_cast<std::size_t>(I), h.alpha1);
    std::vector<double> a2(static_cast<std::size_t>(J), h.alpha2);
    for (int k = 0; k < T; ++k) {
      sample_dirichlet(s.rng, a1, {s.row_factors.col(k).data(), static_cast<std::size_t>(I)});
      sample_dirichlet(s.rng, a2, {s.col_factors.col(k).data(), static_cast<std::size_t>(J)});
    }
  } else {
    for (int k = 0; k < T; ++k) {
      for (int i = 0; i < I; ++i) s.row_factors(i, k) = sample_gamma(s.rng, h.a1, h.b1);
      for (int j = 0; j < J; ++j) s.col_factors(j, k) = sample_gamma(s.rng, h.a2, h.b2);
    }
  }
  for (int k = 0; k < T; ++k) s.lambda[k] = sample_gamma(s.rng, h.gamma0 / T, h.c0);
  s.counts = LatentCounts(x, T);
  sample_latent_counts(s, x);
  return s;
}

double intensity(const TruncatedState& s, int i, int j) {
  if (i < 0 || i >= s.rows() || j < 0 || j >= s.cols()) {
    throw std::out_of_range("intensity: index out of range");
  }
  double total = 0.0;
  for (int k = 0; k < s.T; ++k) total += s.row_factors(i, k) * s.col_factors(j, k) * s.lambda[k];
  return total;
}

double link_probability(const TruncatedState& s, int i, int j) {
  return -std::expm1(-intensity(s, i, j));
}

void sample_latent_counts(TruncatedState& s, const BinaryMatrix& x) {
  if (!s.counts.matches(x, s.T)) s.counts = LatentCounts(x, s.T);
  std::vector<double> w;
  std::vector<count_t> part(static_cast<std::size_t>(s.T));
  for (std::size_t e = 0; e < x.nnz(); ++e) {
    const Cell c = x.ones()[e];
    const double rate = std::max(edge_weights(s, c.row, c.col, w), kIntensityFloor);
    const count_t n = sample_ztp(s.rng, rate);
    sample_multinomial(s.rng, n, w, part);
    s.counts.set_edge(e, part);
  }
}

void sample_factors_epm(TruncatedState& s, Side side) {
  const auto& h = s.hypers;
  const bool rows = side == Side::rows;
  Eigen::MatrixXd& target = rows ? s.row_factors : s.col_factors;
  const Eigen::MatrixXd& other = rows ? s.col_factors : s.row_factors;
  const double shape = rows ? h.a1 : h.a2;
  const double rate0 = rows ? h.b1 : h.b2;
  for (int k = 0; k < s.T; ++k) {
    const double rate = rate0 + other.col(k).sum() * s.lambda[k];
    for (int r = 0; r < target.rows(); ++r) {
      const count_t m = rows ? s.counts.row_atom(r, k) : s.counts.col_atom(r, k);
      target(r, k) = sample_gamma(s.rng, shape + static_cast<double>(m), rate);
    }
  }
}

void sample_factors_epm(TruncatedState& s) {
  sample_factors_epm(s, Side::rows);
  sample_factors_epm(s, Side::cols);
}

void sample_factors_depm(TruncatedState& s, Side side) {
  const bool rows = side == Side::rows;
  Eigen::MatrixXd& target = rows ? s.row_factors : s.col_factors;
  const double alpha = rows ? s.hypers.alpha1 : s.hypers.alpha2;
  const auto n = static_cast<std::size_t>(target.rows());
  std::vector<double> params(n);
  for (int k = 0; k < s.T; ++k) {
    for (std::size_t r = 0; r < n; ++r) {
      const int ri = static_cast<int>(r);
      const count_t m = rows ? s.counts.row_atom(ri, k) : s.counts.col_atom(ri, k);
      params[r] = alpha + static_cast<double>(m);
    }
    sample_dirichlet(s.rng, params, {target.col(k).data(), n});
  }
}

void sample_factors_depm(TruncatedState& s) {
  sample_factors_depm(s, Side::rows);
  sample_factors_depm(s, Side::cols);
}

void sample_lambda(TruncatedState& s) {
  const auto& h = s.hypers;
  const bool simplex = h.variant == Variant::depm;
  for (int k = 0; k < s.T; ++k) {
    const double mass = simplex ? 1.0 : s.row_factors.col(k).sum() * s.col_factors.col(k).sum();
    const double shape = h.gamma0 / s.T + static_cast<double>(s.counts.atom_total(k));
    s.lambda[k] = sample_gamma(s.rng, shape, h.c0 + mass);
  }
}

void sample_c0_truncated(TruncatedState& s) {
  auto& h = s.hypers;
  h.c0 = sample_gamma(s.rng, h.e0 + h.gamma0, h.f0 + s.lambda.sum());
}

void sample_hyper_rates(TruncatedState& s) {
  auto& h = s.hypers;
  if (h.variant == Variant::epm) {
    const double I = s.rows(), J = s.cols();
    h.b1 = sample_gamma(s.rng, h.e0 + I * s.T * h.a1, h.f0 + s.row_factors.sum());
    h.b2 = sample_gamma(s.rng, h.e0 + J * s.T * h.a2, h.f0 + s.col_factors.sum());
  }
  sample_c0_truncated(s);
}

namespace {

// Sum over atoms of log(1 + S_k / b), with S_k = (sum of the other side's factors) * lambda_k.
// This equals -sum_k ln(b / (b + S_k)).
double neg_log_ratio_sum(const TruncatedState& s, Side side, double b) {
  const Eigen::MatrixXd& other = side == Side::rows ? s.col_factors : s.row_factors;
  double acc = 0.0;
  for (int k = 0; k < s.T; ++k) acc += std::log1p(other.col(k).sum() * s.lambda[k] / b);
  return acc;
}

count_t antoniak_tables(TruncatedState& s, Side side, double a) {
  count_t w = 0;
  const int n = side == Side::rows ? s.rows() : s.cols();
  for (int r = 0; r < n; ++r) {
    for (int k = 0; k < s.T; ++k) {
      const count_t m = side == Side::rows ? s.counts.row_atom(r, k) : s.counts.col_atom(r, k);
      if (m > 0) w += sample_antoniak(s.rng, m, a);
    }
  }
  return w;
}

}  // namespace

void sample_hyper_shape_epm(TruncatedState& s, Side side) {
  auto& h = s.hypers;
  const bool rows = side == Side::rows;
  double& a = rows ? h.a1 : h.a2;
  const double b = rows ? h.b1 : h.b2;
  const double n = rows ? s.rows() : s.cols();
  const count_t w = antoniak_tables(s, side, a);
  const double rate = h.f0 + n * neg_log_ratio_sum(s, side, b);
  if (!(rate > 0.0)) throw std::logic_error("shape update: non-positive gamma rate");
  a = sample_gamma(s.rng, h.e0 + static_cast<double>(w), rate);
}

void sample_hyper_shapes_epm(TruncatedState& s) {
  sample_hyper_shape_epm(s, Side::rows);
  sample_hyper_shape_epm(s, Side::cols);
}

const std::vector<double>& cepm_shape_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int p = 1; p <= 99; ++p) {
      const double q = p / 100.0;
      g.push_back(1.0 / q - 1.0);
    }
    return g;
  }();
  return grid;
}

std::vector<double> cepm_grid_log_weights(const TruncatedState& s, Side side) {
  const auto& h = s.hypers;
  const bool rows = side == Side::rows;
  const double C = rows ? h.C1 : h.C2;
  const int n = rows ? s.rows() : s.cols();
  const Eigen::MatrixXd& other = rows ? s.col_factors : s.row_factors;
  std::vector<double> exposure(static_cast<std::size_t>(s.T));
  for (int k = 0; k < s.T; ++k) exposure[k] = other.col(k).sum() * s.lambda[k];

  const auto& grid = cepm_shape_grid();
  std::vector<double> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double a = grid[g];
    const double b = C * a;
    const double lga = log_gamma_fn(a);
    double lw = 0.0;
    for (int k = 0; k < s.T; ++k) {
      lw -= n * a * std::log1p(exposure[k] / b);
      const auto m = static_cast<double>(s.counts.atom_total(k));
      if (m > 0) lw -= m * std::log1p(b / exposure[k]);
    }
    for (int r = 0; r < n; ++r) {
      for (int k = 0; k < s.T; ++k) {
        const count_t m = rows ? s.counts.row_atom(r, k) : s.counts.col_atom(r, k);
        if (m > 0) lw += log_gamma_fn(a + static_cast<double>(m)) - lga;
      }
    }
    lw += (h.e0 - 1.0) * std::log(a) - h.f0 * a;
    out[g] = lw;
  }
  return out;
}

void sample_hyper_shape_cepm(TruncatedState& s, Side side) {
  std::vector<double> lw = cepm_grid_log_weights(s, side);
  const double hi = *std::max_element(lw.begin(), lw.end());
  if (!std::isfinite(hi)) throw std::logic_error("cepm grid: no finite log weight");
  double total = 0.0;
  for (double& v : lw) {
    v = std::exp(v - hi);
    total += v;
  }
  const double a = cepm_shape_grid()[sample_categorical(s.rng, lw, total)];
  auto& h = s.hypers;
  if (side == Side::rows) {
    h.a1 = a;
  } else {
    h.a2 = a;
  }
  enforce_cepm(h);
}

void sample_hyper_shapes_cepm(TruncatedState& s) {
  sample_hyper_shape_cepm(s, Side::rows);
  sample_hyper_shape_cepm(s, Side::cols);
}

void sample_hyper_alpha_depm(TruncatedState& s, Side side) {
  auto& h = s.hypers;
  const bool rows = side == Side::rows;
  double& alpha = rows ? h.alpha1 : h.alpha2;
  const double n = rows ? s.rows() : s.cols();
  double log_v = 0.0;
  for (int k = 0; k < s.T; ++k) {
    const count_t m = s.counts.atom_total(k);
    // Beta(n alpha, 0) is a point mass at 1.
    if (m > 0) log_v += sample_log_beta(s.rng, n * alpha, static_cast<double>(m));
  }
  const count_t w = antoniak_tables(s, side, alpha);
  alpha = sample_gamma(s.rng, h.e0 + static_cast<double>(w), h.f0 - n * log_v);
}

void sample_hyper_alphas_depm(TruncatedState& s) {
  sample_hyper_alpha_depm(s, Side::rows);
  sample_hyper_alpha_depm(s, Side::cols);
}

void sample_gamma0_truncated(TruncatedState& s) {
  auto& h = s.hypers;
  const double share = h.gamma0 / s.T;
  count_t w = 0;
  for (int k = 0; k < s.T; ++k) {
    const count_t m = s.counts.atom_total(k);
    if (m > 0) w += sample_antoniak(s.rng, m, share);
  }
  double rate;
  if (h.variant == Variant::depm) {
    rate = h.f0 + std::log1p(1.0 / h.c0);
  } else {
    double acc = 0.0;
    for (int k = 0; k < s.T; ++k) {
      acc += std::log1p(s.row_factors.col(k).sum() * s.col_factors.col(k).sum() / h.c0);
    }
    rate = h.f0 + acc / s.T;
  }
  h.gamma0 = sample_gamma(s.rng, h.e0 + static_cast<double>(w), rate);
}

void gibbs_sweep(TruncatedState& s, const BinaryMatrix& x) {
  sample_latent_counts(s, x);
  for (Side side : {Side::rows, Side::cols}) {
    switch (s.hypers.variant) {
      case Variant::epm:
        sample_hyper_shape_epm(s, side);
        sample_factors_epm(s, side);
        break;
      case Variant::cepm:
        sample_hyper_shape_cepm(s, side);
        sample_factors_epm(s, side);
        break;
      case Variant::depm:
        sample_hyper_alpha_depm(s, side);
        sample_factors_depm(s, side);
        break;
    }
  }
  sample_gamma0_truncated(s);
  sample_lambda(s);
  sample_hyper_rates(s);
}

int count_active_atoms(const TruncatedState& s) { return s.counts.active_atoms(); }

double log_likelihood(const TruncatedState& s, const BinaryMatrix& x) {
  double ll = 0.0;
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      const double rate = intensity(s, i, j);
      ll += x.at(i, j) ? std::log(std::max(-std::expm1(-rate), 1e-300)) : -rate;
    }
  }
  return ll;
}

}  // namespace epm
