#include "epm/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace epm {

void IdepmHypers::validate() const {
  for (double v : {alpha1, alpha2, gamma0, c0, e0, f0}) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw std::invalid_argument("hyperparameters must be positive and finite");
    }
  }
}

int CountTable::active_atoms() const {
  int k = 0;
  for (const auto& atom : atoms) {
    count_t t = 0;
    for (const auto& e : atom) t += e.count;
    if (t > 0) ++k;
  }
  return k;
}

count_t CountTable::total() const {
  count_t t = 0;
  for (const auto& atom : atoms) {
    for (const auto& e : atom) t += e.count;
  }
  return t;
}

void CountTable::validate() const {
  for (const auto& atom : atoms) {
    for (const auto& e : atom) {
      if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols || e.count < 0) {
        throw std::invalid_argument("count table: entry out of range");
      }
    }
  }
}

namespace {

// Terms shared by the truncated and infinite forms: the per-cell factorials and
// the two Dirichlet-multinomial factors of each active atom. Also returns the
// atom totals.
double common_terms(const CountTable& t, const IdepmHypers& h, std::vector<count_t>& totals) {
  t.validate();
  std::map<std::pair<int, int>, count_t> cell_totals;
  const double I = t.rows, J = t.cols;
  const double lg_ia = log_gamma_fn(I * h.alpha1), lg_a = log_gamma_fn(h.alpha1);
  const double lg_jb = log_gamma_fn(J * h.alpha2), lg_b = log_gamma_fn(h.alpha2);
  totals.clear();
  std::vector<double> atom_terms;
  for (const auto& atom : t.atoms) {
    std::map<int, count_t> by_row, by_col;
    count_t m = 0;
    for (const auto& e : atom) {
      if (e.count == 0) continue;
      by_row[e.row] += e.count;
      by_col[e.col] += e.count;
      cell_totals[{e.row, e.col}] += e.count;
      m += e.count;
    }
    if (m == 0) continue;
    totals.push_back(m);
    const double md = static_cast<double>(m);
    double term = lg_ia - log_gamma_fn(I * h.alpha1 + md);
    for (const auto& [row, c] : by_row) term += log_gamma_fn(h.alpha1 + c) - lg_a;
    term += lg_jb - log_gamma_fn(J * h.alpha2 + md);
    for (const auto& [col, c] : by_col) term += log_gamma_fn(h.alpha2 + c) - lg_b;
    atom_terms.push_back(term);
  }
  // Summing in sorted order makes the result independent of atom labelling.
  std::sort(atom_terms.begin(), atom_terms.end());
  std::sort(totals.begin(), totals.end());
  double lp = 0.0;
  for (const auto& [cell, m] : cell_totals) lp -= log_gamma_fn(static_cast<double>(m) + 1.0);
  for (double term : atom_terms) lp += term;
  return lp;
}

}  // namespace

double log_marginal_likelihood(const CountTable& table, const IdepmHypers& h) {
  h.validate();
  std::vector<count_t> totals;
  double lp = common_terms(table, h, totals);
  const double log_ratio = -std::log1p(1.0 / h.c0);  // ln(c0 / (c0 + 1))
  lp += static_cast<double>(totals.size()) * std::log(h.gamma0) + h.gamma0 * log_ratio;
  for (count_t m : totals) {
    const double md = static_cast<double>(m);
    lp += log_gamma_fn(md) - md * std::log1p(h.c0);
  }
  return lp;
}

double log_marginal_likelihood_truncated(const CountTable& table, std::int64_t T,
                                         const IdepmHypers& h, bool partition) {
  h.validate();
  std::vector<count_t> totals;
  double lp = common_terms(table, h, totals);
  const auto K = static_cast<std::int64_t>(totals.size());
  if (T < 1 || K > T) throw std::invalid_argument("truncated marginal: need K+ <= T");
  const double Td = static_cast<double>(T);
  const double share = h.gamma0 / Td;
  // T!/((T-K)! T^K) = prod_{r<K} (1 - r/T)
  for (std::int64_t r = 1; r < K; ++r) lp += std::log1p(-static_cast<double>(r) / Td);
  lp += static_cast<double>(K) * std::log(h.gamma0) - h.gamma0 * std::log1p(1.0 / h.c0);
  for (count_t m : totals) {
    for (count_t l = 1; l < m; ++l) lp += std::log(static_cast<double>(l) + share);
    lp -= static_cast<double>(m) * std::log1p(h.c0);
  }
  if (!partition) {
    // divide by T!/(T-K)!
    for (std::int64_t r = 0; r < K; ++r) lp -= std::log(Td - static_cast<double>(r));
  }
  return lp;
}

}  // namespace epm
