#include "epm/latent_counts.hpp"

#include <algorithm>
#include <stdexcept>

namespace epm {

LatentCounts::LatentCounts(const BinaryMatrix& x, int atoms)
    : rows_(x.rows()), cols_(x.cols()), atoms_(atoms), cells_(x.ones()) {
  if (atoms < 0) throw std::invalid_argument("counts: negative atom count");
  const auto t = static_cast<std::size_t>(atoms);
  per_edge_.assign(cells_.size() * t, 0);
  edge_total_.assign(cells_.size(), 0);
  row_atom_.assign(static_cast<std::size_t>(rows_) * t, 0);
  col_atom_.assign(static_cast<std::size_t>(cols_) * t, 0);
  atom_total_.assign(t, 0);
}

void LatentCounts::set_edge(std::size_t e, std::span<const count_t> per_atom) {
  if (per_atom.size() != static_cast<std::size_t>(atoms_)) {
    throw std::invalid_argument("counts: atom dimension mismatch");
  }
  const Cell c = cells_[e];
  count_t* dst = per_edge_.data() + e * static_cast<std::size_t>(atoms_);
  count_t sum = 0;
  for (int k = 0; k < atoms_; ++k) {
    const count_t delta = per_atom[k] - dst[k];
    if (per_atom[k] < 0) throw std::logic_error("counts: negative atom count");
    if (delta != 0) {
      row_atom_[idx(c.row, k)] += delta;
      col_atom_[idx(c.col, k)] += delta;
      atom_total_[static_cast<std::size_t>(k)] += delta;
      dst[k] = per_atom[k];
    }
    sum += per_atom[k];
  }
  total_ += sum - edge_total_[e];
  edge_total_[e] = sum;
}

void LatentCounts::clear() {
  std::fill(per_edge_.begin(), per_edge_.end(), 0);
  std::fill(edge_total_.begin(), edge_total_.end(), 0);
  std::fill(row_atom_.begin(), row_atom_.end(), 0);
  std::fill(col_atom_.begin(), col_atom_.end(), 0);
  std::fill(atom_total_.begin(), atom_total_.end(), 0);
  total_ = 0;
}

void LatentCounts::rebuild() {
  std::fill(row_atom_.begin(), row_atom_.end(), 0);
  std::fill(col_atom_.begin(), col_atom_.end(), 0);
  std::fill(atom_total_.begin(), atom_total_.end(), 0);
  total_ = 0;
  for (std::size_t e = 0; e < cells_.size(); ++e) {
    count_t sum = 0;
    for (int k = 0; k < atoms_; ++k) {
      const count_t v = edge(e)[k];
      row_atom_[idx(cells_[e].row, k)] += v;
      col_atom_[idx(cells_[e].col, k)] += v;
      atom_total_[static_cast<std::size_t>(k)] += v;
      sum += v;
    }
    edge_total_[e] = sum;
    total_ += sum;
  }
}

bool LatentCounts::audit() const {
  LatentCounts fresh = *this;
  fresh.rebuild();
  return fresh == *this;
}

int LatentCounts::active_atoms() const {
  return static_cast<int>(
      std::count_if(atom_total_.begin(), atom_total_.end(), [](count_t v) { return v > 0; }));
}

}  // namespace epm
