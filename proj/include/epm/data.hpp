#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "epm/rng.hpp"

namespace epm {

struct Cell {
  std::int32_t row;
  std::int32_t col;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// I x J binary matrix stored as the sorted, duplicate-free set of its ones.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(int rows, int cols);
  /// Sorts and deduplicates; throws on out-of-range cells.
  BinaryMatrix(int rows, int cols, std::vector<Cell> ones);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return ones_.size(); }
  double density() const;

  /// Row-major sorted one-entries. An edge index is a position in this list.
  const std::vector<Cell>& ones() const { return ones_; }
  bool at(int row, int col) const;
  /// Edge index of (row, col), or -1 for a zero entry.
  std::int64_t edge_index(int row, int col) const;

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  void build_rows();

  int rows_ = 0;
  int cols_ = 0;
  std::vector<Cell> ones_;
  std::vector<std::size_t> row_start_;
};

struct LoadStats {
  std::size_t lines = 0;
  std::size_t duplicates = 0;
  std::vector<std::string> warnings;
};

/// Edge list: optional `# I J` header, then `i j` per line (zero-based,
/// whitespace separated). Without a header the shape is max index + 1.
BinaryMatrix load_edge_list(std::istream& in, LoadStats* stats = nullptr);
BinaryMatrix load_edge_list_file(const std::string& path, LoadStats* stats = nullptr);

/// Ratings: `user item rating` per line; x = 1 iff rating > threshold.
BinaryMatrix load_ratings(std::istream& in, double threshold = 3.0, LoadStats* stats = nullptr);

/// Writes the header followed by one `i j` line per one-entry, row-major.
void save_edge_list(std::ostream& out, const BinaryMatrix& m);
void save_edge_list_file(const std::string& path, const BinaryMatrix& m);

/// Half-open row and column extents of one latent class.
struct Block {
  int row_begin;
  int row_end;
  int col_begin;
  int col_end;
  double on_prob = 1.0;

  friend bool operator==(const Block&, const Block&) = default;
};

struct SyntheticSpec {
  int rows = 90;
  int cols = 90;
  std::vector<Block> blocks;
  double noise = 0.0;
  std::uint64_t seed = 0;

  /// 90 x 90 with five overlapping classes.
  static SyntheticSpec standard();
  /// `blocks`, or `rows=90;cols=90;noise=0;seed=1;block=r0:r1:c0:c1[:p];...`
  static SyntheticSpec parse(const std::string& text);
  std::string to_string() const;
  void validate() const;
};

struct SyntheticData {
  BinaryMatrix matrix;
  SyntheticSpec spec;
  /// Number of cells covered by at least one block.
  std::size_t covered_cells = 0;
};

SyntheticData make_synthetic_blocks(const SyntheticSpec& spec, Rng& rng);
/// Uses a generator seeded from spec.seed.
SyntheticData make_synthetic_blocks(const SyntheticSpec& spec);
/// JSON metadata: shape, blocks, noise, seed, ones, density.
std::string synthetic_metadata_json(const SyntheticData& data);

struct TestEntry {
  std::int32_t row;
  std::int32_t col;
  std::uint8_t value;
};

struct HoldoutSplit {
  BinaryMatrix train;
  std::vector<TestEntry> test;
};

HoldoutSplit make_holdout(const BinaryMatrix& source, std::vector<Cell> test_cells);

/// Partitions all I*J cells into n_folds test sets of near-equal size.
std::vector<HoldoutSplit> make_cv_folds(const BinaryMatrix& m, int n_folds, Rng& rng);

}  // namespace epm
