#include "epm/idepm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace epm {

namespace {

constexpr double kIntensityFloor = 1e-300;

int new_atom(CollapsedState& s) {
  Atom a;
  a.id = s.next_id++;
  a.row_counts.assign(static_cast<std::size_t>(s.rows), 0);
  a.col_counts.assign(static_cast<std::size_t>(s.cols), 0);
  s.atoms.push_back(std::move(a));
  const int slot = static_cast<int>(s.atoms.size()) - 1;
  if (s.slot_of_id.size() <= static_cast<std::size_t>(s.atoms.back().id)) {
    s.slot_of_id.resize(static_cast<std::size_t>(s.atoms.back().id) + 1, -1);
  }
  s.slot_of_id[static_cast<std::size_t>(s.atoms.back().id)] = slot;
  return slot;
}

void remove_atom(CollapsedState& s, int slot) {
  s.slot_of_id[static_cast<std::size_t>(s.atoms[slot].id)] = -1;
  const int last = static_cast<int>(s.atoms.size()) - 1;
  if (slot != last) {
    s.atoms[slot] = std::move(s.atoms[last]);
    s.slot_of_id[static_cast<std::size_t>(s.atoms[slot].id)] = slot;
  }
  s.atoms.pop_back();
}

void add_customer(Atom& a, int i, int j) {
  ++a.total;
  ++a.row_counts[i];
  ++a.col_counts[j];
}

// Returns true if the atom became empty.
bool remove_customer(Atom& a, int i, int j) {
  if (a.total <= 0 || a.row_counts[i] <= 0 || a.col_counts[j] <= 0) {
    throw std::logic_error("collapsed sampler: count statistic below zero");
  }
  --a.total;
  --a.row_counts[i];
  --a.col_counts[j];
  return a.total == 0;
}

int slot_of(const CollapsedState& s, std::int64_t id) {
  const int slot = s.slot_of_id.at(static_cast<std::size_t>(id));
  if (slot < 0) throw std::logic_error("collapsed sampler: label refers to retired atom");
  return slot;
}

// Seats one customer at cell (i, j) by the assignment rule; returns its atom id.
std::int64_t seat(CollapsedState& s, int i, int j, std::vector<double>& w) {
  assignment_weights(s, i, j, w);
  double total = 0.0;
  for (double v : w) total += v;
  const auto choice = sample_categorical(s.rng, w, total);
  const int slot = choice == s.atoms.size() ? new_atom(s) : static_cast<int>(choice);
  add_customer(s.atoms[slot], i, j);
  return s.atoms[slot].id;
}

}  // namespace

void rebuild_statistics(CollapsedState& s) {
  for (Atom& a : s.atoms) {
    a.total = 0;
    std::fill(a.row_counts.begin(), a.row_counts.end(), 0);
    std::fill(a.col_counts.begin(), a.col_counts.end(), 0);
  }
  for (std::size_t e = 0; e < s.cells.size(); ++e) {
    for (std::size_t c = s.offsets[e]; c < s.offsets[e + 1]; ++c) {
      add_customer(s.atoms[slot_of(s, s.labels[c])], s.cells[e].row, s.cells[e].col);
    }
  }
  for (int slot = static_cast<int>(s.atoms.size()) - 1; slot >= 0; --slot) {
    if (s.atoms[slot].total == 0) remove_atom(s, slot);
  }
}

void assignment_weights(const CollapsedState& s, int i, int j, std::vector<double>& out) {
  const auto& h = s.hypers;
  const double ia = s.rows * h.alpha1, ja = s.cols * h.alpha2;
  out.resize(s.atoms.size() + 1);
  for (std::size_t k = 0; k < s.atoms.size(); ++k) {
    const Atom& a = s.atoms[k];
    const double m = static_cast<double>(a.total);
    out[k] = m * (h.alpha1 + static_cast<double>(a.row_counts[i])) / (ia + m) *
             (h.alpha2 + static_cast<double>(a.col_counts[j])) / (ja + m);
  }
  out.back() = h.gamma0 / (static_cast<double>(s.rows) * static_cast<double>(s.cols));
}

CollapsedState init_collapsed(const BinaryMatrix& x, const IdepmHypers& hypers, Rng rng) {
  hypers.validate();
  CollapsedState s;
  s.rows = x.rows();
  s.cols = x.cols();
  s.hypers = hypers;
  s.rng = std::move(rng);
  s.cells = x.ones();
  s.offsets.resize(s.cells.size() + 1);
  for (std::size_t e = 0; e <= s.cells.size(); ++e) s.offsets[e] = e;
  s.labels.resize(s.cells.size());
  std::vector<double> w;
  for (std::size_t e = 0; e < s.cells.size(); ++e) {
    s.labels[e] = seat(s, s.cells[e].row, s.cells[e].col, w);
  }
  return s;
}

CollapsedState collapsed_from_table(const CountTable& table, const IdepmHypers& hypers, Rng rng) {
  hypers.validate();
  table.validate();
  CollapsedState s;
  s.rows = table.rows;
  s.cols = table.cols;
  s.hypers = hypers;
  s.rng = std::move(rng);
  // cell -> list of (atom index, count)
  std::map<Cell, std::vector<std::pair<int, count_t>>> by_cell;
  std::vector<int> slot_for_atom(table.atoms.size(), -1);
  for (std::size_t a = 0; a < table.atoms.size(); ++a) {
    for (const auto& e : table.atoms[a]) {
      if (e.count <= 0) continue;
      if (slot_for_atom[a] < 0) slot_for_atom[a] = new_atom(s);
      by_cell[Cell{e.row, e.col}].push_back({slot_for_atom[a], e.count});
    }
  }
  s.offsets.push_back(0);
  for (const auto& [cell, parts] : by_cell) {
    s.cells.push_back(cell);
    for (const auto& [slot, n] : parts) {
      for (count_t c = 0; c < n; ++c) s.labels.push_back(s.atoms[slot].id);
    }
    s.offsets.push_back(s.labels.size());
  }
  rebuild_statistics(s);
  return s;
}

CountTable to_count_table(const CollapsedState& s) {
  CountTable t;
  t.rows = s.rows;
  t.cols = s.cols;
  t.atoms.resize(s.atoms.size());
  std::vector<count_t> per_slot(s.atoms.size(), 0);
  for (std::size_t e = 0; e < s.cells.size(); ++e) {
    std::fill(per_slot.begin(), per_slot.end(), 0);
    for (std::size_t c = s.offsets[e]; c < s.offsets[e + 1]; ++c) ++per_slot[slot_of(s, s.labels[c])];
    for (std::size_t k = 0; k < per_slot.size(); ++k) {
      if (per_slot[k] > 0) t.atoms[k].push_back({s.cells[e].row, s.cells[e].col, per_slot[k]});
    }
  }
  return t;
}

void sample_assignments(CollapsedState& s) {
  std::vector<double> w;
  for (std::size_t e = 0; e < s.cells.size(); ++e) {
    const int i = s.cells[e].row, j = s.cells[e].col;
    for (std::size_t c = s.offsets[e]; c < s.offsets[e + 1]; ++c) {
      const int slot = slot_of(s, s.labels[c]);
      if (remove_customer(s.atoms[slot], i, j)) remove_atom(s, slot);
      s.labels[c] = seat(s, i, j, w);
    }
  }
}

void instantiate_parameters(CollapsedState& s) {
  const auto& h = s.hypers;
  const auto K = static_cast<Eigen::Index>(s.atoms.size());
  auto& p = s.params;
  p.ids.resize(s.atoms.size());
  p.phi.resize(s.rows, K);
  p.psi.resize(s.cols, K);
  p.lambda.resize(K);
  std::vector<double> row_alpha(static_cast<std::size_t>(s.rows));
  std::vector<double> col_alpha(static_cast<std::size_t>(s.cols));
  for (Eigen::Index k = 0; k < K; ++k) {
    const Atom& a = s.atoms[static_cast<std::size_t>(k)];
    p.ids[static_cast<std::size_t>(k)] = a.id;
    for (int i = 0; i < s.rows; ++i) row_alpha[i] = h.alpha1 + static_cast<double>(a.row_counts[i]);
    for (int j = 0; j < s.cols; ++j) col_alpha[j] = h.alpha2 + static_cast<double>(a.col_counts[j]);
    sample_dirichlet(s.rng, row_alpha, {p.phi.col(k).data(), row_alpha.size()});
    sample_dirichlet(s.rng, col_alpha, {p.psi.col(k).data(), col_alpha.size()});
    p.lambda[k] = sample_gamma(s.rng, static_cast<double>(a.total), h.c0 + 1.0);
  }
  p.lambda_rest = sample_gamma(s.rng, h.gamma0, h.c0 + 1.0);
}

void sample_counts(CollapsedState& s, const BinaryMatrix& x) {
  if (x.ones() != s.cells) throw std::invalid_argument("sample_counts: matrix does not match state");
  const auto& p = s.params;
  if (p.ids.size() != s.atoms.size()) {
    throw std::logic_error("sample_counts: parameters not instantiated for current atoms");
  }
  for (std::size_t k = 0; k < s.atoms.size(); ++k) {
    if (p.ids[k] != s.atoms[k].id) {
      throw std::logic_error("sample_counts: parameters not instantiated for current atoms");
    }
  }
  const std::size_t K = s.atoms.size();
  if (K == 0 && !s.cells.empty()) {
    throw std::logic_error("sample_counts: one-entries present but no active atom");
  }
  std::vector<double> w(K);
  std::vector<count_t> part(K);
  std::vector<std::int64_t> labels;
  labels.reserve(s.labels.size());
  std::vector<std::size_t> offsets(s.cells.size() + 1, 0);
  for (std::size_t e = 0; e < s.cells.size(); ++e) {
    const int i = s.cells[e].row, j = s.cells[e].col;
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      w[k] = p.phi(i, kk) * p.psi(j, kk) * p.lambda[kk];
      total += w[k];
    }
    if (total < std::numeric_limits<double>::min()) {
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < K; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        w[k] = std::log(p.phi(i, kk)) + std::log(p.psi(j, kk)) + std::log(p.lambda[kk]);
        hi = std::max(hi, w[k]);
      }
      for (double& v : w) v = std::exp(v - hi);
    }
    const count_t n = sample_ztp(s.rng, std::max(total, kIntensityFloor));
    sample_multinomial(s.rng, n, w, part);
    for (std::size_t k = 0; k < K; ++k) {
      for (count_t c = 0; c < part[k]; ++c) labels.push_back(s.atoms[k].id);
    }
    offsets[e + 1] = labels.size();
  }
  s.labels = std::move(labels);
  s.offsets = std::move(offsets);
  rebuild_statistics(s);
}

void sample_alpha_idepm(CollapsedState& s, bool rows) {
  auto& h = s.hypers;
  double& alpha = rows ? h.alpha1 : h.alpha2;
  const double n = rows ? s.rows : s.cols;
  double log_v = 0.0;
  count_t w = 0;
  for (const Atom& a : s.atoms) {
    log_v += sample_log_beta(s.rng, n * alpha, static_cast<double>(a.total));
    for (count_t m : rows ? a.row_counts : a.col_counts) {
      if (m > 0) w += sample_antoniak(s.rng, m, alpha);
    }
  }
  alpha = sample_gamma(s.rng, h.e0 + static_cast<double>(w), h.f0 - n * log_v);
}

void sample_gamma0_idepm(CollapsedState& s) {
  auto& h = s.hypers;
  h.gamma0 = sample_gamma(s.rng, h.e0 + static_cast<double>(s.atoms.size()),
                          h.f0 + std::log1p(1.0 / h.c0));
}

void sample_c0_idepm(CollapsedState& s) {
  // Atom weights are redrawn given the current counts and gamma0, then c0.
  auto& h = s.hypers;
  double mass = sample_gamma(s.rng, h.gamma0, h.c0 + 1.0);
  for (const Atom& a : s.atoms) mass += sample_gamma(s.rng, static_cast<double>(a.total), h.c0 + 1.0);
  h.c0 = sample_gamma(s.rng, h.e0 + h.gamma0, h.f0 + mass);
}

void sample_hypers_idepm(CollapsedState& s) {
  sample_alpha_idepm(s, true);
  sample_alpha_idepm(s, false);
  sample_gamma0_idepm(s);
  sample_c0_idepm(s);
}

void collapsed_sweep(CollapsedState& s, const BinaryMatrix& x) {
  sample_assignments(s);
  instantiate_parameters(s);
  sample_counts(s, x);
  sample_hypers_idepm(s);
}

double log_marginal_likelihood(const CollapsedState& s) {
  return log_marginal_likelihood(to_count_table(s), s.hypers);
}

double intensity(const CollapsedState& s, int i, int j) {
  if (i < 0 || i >= s.rows || j < 0 || j >= s.cols) {
    throw std::out_of_range("intensity: index out of range");
  }
  const auto& p = s.params;
  double total = 0.0;
  for (Eigen::Index k = 0; k < p.lambda.size(); ++k) total += p.phi(i, k) * p.psi(j, k) * p.lambda[k];
  return total;
}

double link_probability(const CollapsedState& s, int i, int j) {
  return -std::expm1(-intensity(s, i, j));
}

bool audit(const CollapsedState& s) {
  if (s.offsets.size() != s.cells.size() + 1 || s.offsets.back() != s.labels.size()) return false;
  for (std::size_t k = 0; k < s.atoms.size(); ++k) {
    const auto id = static_cast<std::size_t>(s.atoms[k].id);
    if (id >= s.slot_of_id.size() || s.slot_of_id[id] != static_cast<int>(k)) return false;
    if (s.atoms[k].total <= 0) return false;
  }
  CollapsedState fresh = s;
  try {
    rebuild_statistics(fresh);
  } catch (const std::exception&) {
    return false;
  }
  if (fresh.atoms.size() != s.atoms.size()) return false;
  for (std::size_t k = 0; k < s.atoms.size(); ++k) {
    const Atom& a = s.atoms[k];
    const Atom& b = fresh.atoms[k];
    if (a.id != b.id || a.total != b.total || a.row_counts != b.row_counts ||
        a.col_counts != b.col_counts) {
      return false;
    }
  }
  return true;
}

void permute_atoms(CollapsedState& s, const std::vector<int>& order) {
  if (order.size() != s.atoms.size()) throw std::invalid_argument("permute_atoms: size mismatch");
  std::vector<Atom> reordered;
  reordered.reserve(order.size());
  for (int slot : order) reordered.push_back(s.atoms.at(static_cast<std::size_t>(slot)));
  s.atoms = std::move(reordered);
  for (std::size_t k = 0; k < s.atoms.size(); ++k) {
    s.slot_of_id[static_cast<std::size_t>(s.atoms[k].id)] = static_cast<int>(k);
  }
}

}  // namespace epm
