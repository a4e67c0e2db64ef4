#pragma once

#include <span>
#include <vector>

#include "epm/data.hpp"
#include "epm/distributions.hpp"

namespace epm {

/// Per-edge atom counts m(i,j,k) for the one-entries of a matrix, with
/// cached marginals m(i,.,k), m(.,j,k), m(.,.,k) and totals m(i,j,.).
class LatentCounts {
 public:
  LatentCounts() = default;
  LatentCounts(const BinaryMatrix& x, int atoms);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int atoms() const { return atoms_; }
  std::size_t edges() const { return cells_.size(); }
  const Cell& cell(std::size_t e) const { return cells_[e]; }

  std::span<const count_t> edge(std::size_t e) const {
    return {per_edge_.data() + e * static_cast<std::size_t>(atoms_),
            static_cast<std::size_t>(atoms_)};
  }
  count_t edge_total(std::size_t e) const { return edge_total_[e]; }
  count_t row_atom(int i, int k) const { return row_atom_[idx(i, k)]; }
  count_t col_atom(int j, int k) const { return col_atom_[idx(j, k)]; }
  count_t atom_total(int k) const { return atom_total_[static_cast<std::size_t>(k)]; }
  count_t total() const { return total_; }

  /// Replaces the counts of one edge and updates every cached marginal.
  void set_edge(std::size_t e, std::span<const count_t> per_atom);
  void clear();

  /// Rebuilds every marginal from the per-edge counts.
  void rebuild();
  /// True iff every cached marginal equals the direct sum of its constituents.
  bool audit() const;

  int active_atoms() const;
  /// True iff the edges are exactly the one-entries of x and the shape matches.
  bool matches(const BinaryMatrix& x, int atoms) const {
    return atoms == atoms_ && x.rows() == rows_ && x.cols() == cols_ && x.ones() == cells_;
  }

  friend bool operator==(const LatentCounts&, const LatentCounts&) = default;

 private:
  std::size_t idx(int r, int k) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(atoms_) +
           static_cast<std::size_t>(k);
  }

  int rows_ = 0;
  int cols_ = 0;
  int atoms_ = 0;
  std::vector<Cell> cells_;
  std::vector<count_t> per_edge_;
  std::vector<count_t> edge_total_;
  std::vector<count_t> row_atom_;
  std::vector<count_t> col_atom_;
  std::vector<count_t> atom_total_;
  count_t total_ = 0;
};

}  // namespace epm
