#include "epm/data.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace epm {

BinaryMatrix::BinaryMatrix(int rows, int cols) : BinaryMatrix(rows, cols, {}) {}

BinaryMatrix::BinaryMatrix(int rows, int cols, std::vector<Cell> ones)
    : rows_(rows), cols_(cols), ones_(std::move(ones)) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("matrix: negative shape");
  for (const Cell& c : ones_) {
    if (c.row < 0 || c.row >= rows || c.col < 0 || c.col >= cols) {
      throw std::out_of_range("matrix: cell (" + std::to_string(c.row) + "," +
                              std::to_string(c.col) + ") outside " + std::to_string(rows) +
                              "x" + std::to_string(cols));
    }
  }
  std::sort(ones_.begin(), ones_.end());
  ones_.erase(std::unique(ones_.begin(), ones_.end()), ones_.end());
  build_rows();
}

void BinaryMatrix::build_rows() {
  row_start_.assign(static_cast<std::size_t>(rows_) + 1, 0);
  for (const Cell& c : ones_) ++row_start_[static_cast<std::size_t>(c.row) + 1];
  std::partial_sum(row_start_.begin(), row_start_.end(), row_start_.begin());
}

double BinaryMatrix::density() const {
  const double cells = static_cast<double>(rows_) * static_cast<double>(cols_);
  return cells > 0 ? static_cast<double>(ones_.size()) / cells : 0.0;
}

std::int64_t BinaryMatrix::edge_index(int row, int col) const {
  if (row < 0 || row >= rows_) return -1;
  auto first = ones_.begin() + static_cast<std::ptrdiff_t>(row_start_[row]);
  auto last = ones_.begin() + static_cast<std::ptrdiff_t>(row_start_[row + 1]);
  auto it = std::lower_bound(first, last, Cell{row, col});
  if (it == last || it->col != col) return -1;
  return it - ones_.begin();
}

bool BinaryMatrix::at(int row, int col) const { return edge_index(row, col) >= 0; }

namespace {

bool blank_or_comment(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos;
}

// Parses "# I J"; returns false for other comment lines.
bool parse_header(const std::string& line, int& rows, int& cols) {
  std::istringstream ss(line);
  char hash;
  ss >> hash;
  if (hash != '#') return false;
  long r, c;
  if (!(ss >> r >> c)) return false;
  std::string rest;
  if (ss >> rest) return false;
  if (r <= 0 || c <= 0) throw std::runtime_error("header shape must be positive");
  rows = static_cast<int>(r);
  cols = static_cast<int>(c);
  return true;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& line) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": malformed entry '" + line +
                           "'");
}

BinaryMatrix assemble(std::vector<Cell> cells, int rows, int cols, bool have_header,
                      LoadStats* stats) {
  if (!have_header) {
    rows = 0;
    cols = 0;
    for (const Cell& c : cells) {
      rows = std::max(rows, c.row + 1);
      cols = std::max(cols, c.col + 1);
    }
  }
  const std::size_t listed = cells.size();
  BinaryMatrix m(rows, cols, std::move(cells));
  if (stats) {
    stats->duplicates = listed - m.nnz();
    if (stats->duplicates > 0) {
      stats->warnings.push_back(std::to_string(stats->duplicates) +
                                " duplicate entries collapsed");
    }
  }
  return m;
}

}  // namespace

BinaryMatrix load_edge_list(std::istream& in, LoadStats* stats) {
  int rows = 0, cols = 0;
  bool have_header = false;
  std::vector<Cell> cells;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    if (line[line.find_first_not_of(" \t")] == '#') {
      if (!have_header && cells.empty() && parse_header(line, rows, cols)) have_header = true;
      continue;
    }
    std::istringstream ss(line);
    long i, j;
    std::string rest;
    if (!(ss >> i >> j) || (ss >> rest) || i < 0 || j < 0) malformed(line_no, line);
    if (have_header && (i >= rows || j >= cols)) {
      throw std::out_of_range("line " + std::to_string(line_no) + ": index out of range for " +
                              std::to_string(rows) + "x" + std::to_string(cols));
    }
    cells.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)});
  }
  if (stats) stats->lines = line_no;
  return assemble(std::move(cells), rows, cols, have_header, stats);
}

BinaryMatrix load_edge_list_file(const std::string& path, LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_edge_list(in, stats);
}

BinaryMatrix load_ratings(std::istream& in, double threshold, LoadStats* stats) {
  int rows = 0, cols = 0, seen_rows = 0, seen_cols = 0;
  bool have_header = false;
  std::vector<Cell> cells;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    if (line[line.find_first_not_of(" \t")] == '#') {
      if (!have_header && line_no == 1 && parse_header(line, rows, cols)) have_header = true;
      continue;
    }
    std::istringstream ss(line);
    long u, v;
    double rating;
    std::string rest;
    if (!(ss >> u >> v >> rating) || (ss >> rest) || u < 0 || v < 0) malformed(line_no, line);
    if (have_header && (u >= rows || v >= cols)) {
      throw std::out_of_range("line " + std::to_string(line_no) + ": index out of range");
    }
    seen_rows = std::max(seen_rows, static_cast<int>(u) + 1);
    seen_cols = std::max(seen_cols, static_cast<int>(v) + 1);
    if (rating > threshold) {
      cells.push_back({static_cast<std::int32_t>(u), static_cast<std::int32_t>(v)});
    }
  }
  if (stats) stats->lines = line_no;
  if (!have_header) {
    rows = seen_rows;
    cols = seen_cols;
  }
  return assemble(std::move(cells), rows, cols, true, stats);
}

void save_edge_list(std::ostream& out, const BinaryMatrix& m) {
  out << "# " << m.rows() << ' ' << m.cols() << '\n';
  for (const Cell& c : m.ones()) out << c.row << ' ' << c.col << '\n';
}

void save_edge_list_file(const std::string& path, const BinaryMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  save_edge_list(out, m);
}

SyntheticSpec SyntheticSpec::standard() {
  SyntheticSpec s;
  s.rows = 90;
  s.cols = 90;
  s.blocks = {
      {0, 30, 0, 30},
      {20, 50, 15, 45},
      {40, 70, 35, 65},
      {60, 90, 55, 90},
      {10, 40, 55, 80},
  };
  s.noise = 0.0;
  s.seed = 1;
  return s;
}

void SyntheticSpec::validate() const {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("synthetic: shape must be positive");
  if (!(noise >= 0.0 && noise < 1.0)) throw std::invalid_argument("synthetic: noise in [0,1)");
  for (const Block& b : blocks) {
    if (b.row_begin < 0 || b.row_end > rows || b.row_begin >= b.row_end || b.col_begin < 0 ||
        b.col_end > cols || b.col_begin >= b.col_end) {
      throw std::invalid_argument("synthetic: block extents outside matrix bounds");
    }
    if (!(b.on_prob >= 0.0 && b.on_prob <= 1.0)) {
      throw std::invalid_argument("synthetic: block on-probability in [0,1]");
    }
  }
}

SyntheticSpec SyntheticSpec::parse(const std::string& text) {
  if (text == "blocks") return standard();
  SyntheticSpec s;
  s.blocks.clear();
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("synthetic: expected key=value in '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "rows") {
        s.rows = std::stoi(value);
      } else if (key == "cols") {
        s.cols = std::stoi(value);
      } else if (key == "noise") {
        s.noise = std::stod(value);
      } else if (key == "seed") {
        s.seed = std::stoull(value);
      } else if (key == "block") {
        Block b{};
        std::istringstream bs(value);
        std::string part;
        std::vector<double> parts;
        while (std::getline(bs, part, ':')) parts.push_back(std::stod(part));
        if (parts.size() != 4 && parts.size() != 5) throw std::invalid_argument("block");
        b.row_begin = static_cast<int>(parts[0]);
        b.row_end = static_cast<int>(parts[1]);
        b.col_begin = static_cast<int>(parts[2]);
        b.col_end = static_cast<int>(parts[3]);
        if (parts.size() == 5) b.on_prob = parts[4];
        s.blocks.push_back(b);
      } else {
        throw std::invalid_argument("unknown key");
      }
    } catch (const std::logic_error&) {
      throw std::invalid_argument("synthetic: bad item '" + item + "'");
    }
  }
  s.validate();
  return s;
}

std::string SyntheticSpec::to_string() const {
  std::ostringstream os;
  os << "rows=" << rows << ";cols=" << cols << ";noise=" << noise << ";seed=" << seed;
  for (const Block& b : blocks) {
    os << ";block=" << b.row_begin << ':' << b.row_end << ':' << b.col_begin << ':' << b.col_end;
    if (b.on_prob != 1.0) os << ':' << b.on_prob;
  }
  return os.str();
}

SyntheticData make_synthetic_blocks(const SyntheticSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<Cell> ones;
  std::size_t covered = 0;
  for (int i = 0; i < spec.rows; ++i) {
    for (int j = 0; j < spec.cols; ++j) {
      bool in_block = false;
      bool on = false;
      for (const Block& b : spec.blocks) {
        if (i < b.row_begin || i >= b.row_end || j < b.col_begin || j >= b.col_end) continue;
        in_block = true;
        if (b.on_prob >= 1.0 || rng.uniform() < b.on_prob) on = true;
      }
      if (in_block) ++covered;
      if (!on && spec.noise > 0.0 && rng.uniform() < spec.noise) on = true;
      if (on) ones.push_back({i, j});
    }
  }
  return {BinaryMatrix(spec.rows, spec.cols, std::move(ones)), spec, covered};
}

SyntheticData make_synthetic_blocks(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  return make_synthetic_blocks(spec, rng);
}

std::string synthetic_metadata_json(const SyntheticData& data) {
  nlohmann::ordered_json j;
  j["rows"] = data.spec.rows;
  j["cols"] = data.spec.cols;
  j["n_classes"] = data.spec.blocks.size();
  auto blocks = nlohmann::ordered_json::array();
  for (const Block& b : data.spec.blocks) {
    blocks.push_back({{"row_begin", b.row_begin},
                      {"row_end", b.row_end},
                      {"col_begin", b.col_begin},
                      {"col_end", b.col_end},
                      {"on_prob", b.on_prob}});
  }
  j["blocks"] = blocks;
  j["noise"] = data.spec.noise;
  j["seed"] = data.spec.seed;
  j["covered_cells"] = data.covered_cells;
  j["ones"] = data.matrix.nnz();
  j["density"] = data.matrix.density();
  return j.dump(2);
}

HoldoutSplit make_holdout(const BinaryMatrix& source, std::vector<Cell> test_cells) {
  std::sort(test_cells.begin(), test_cells.end());
  if (std::adjacent_find(test_cells.begin(), test_cells.end()) != test_cells.end()) {
    throw std::invalid_argument("holdout: duplicate test cell");
  }
  HoldoutSplit split;
  split.test.reserve(test_cells.size());
  for (const Cell& c : test_cells) {
    split.test.push_back({c.row, c.col, static_cast<std::uint8_t>(source.at(c.row, c.col))});
  }
  std::vector<Cell> kept;
  kept.reserve(source.nnz());
  for (const Cell& c : source.ones()) {
    if (!std::binary_search(test_cells.begin(), test_cells.end(), c)) kept.push_back(c);
  }
  split.train = BinaryMatrix(source.rows(), source.cols(), std::move(kept));
  return split;
}

std::vector<HoldoutSplit> make_cv_folds(const BinaryMatrix& m, int n_folds, Rng& rng) {
  const std::int64_t cells = static_cast<std::int64_t>(m.rows()) * m.cols();
  if (n_folds < 2) throw std::invalid_argument("folds: need at least two folds");
  if (cells < n_folds) throw std::invalid_argument("folds: fewer cells than folds");
  std::vector<std::int64_t> order(static_cast<std::size_t>(cells));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  std::vector<std::vector<Cell>> assigned(static_cast<std::size_t>(n_folds));
  for (std::size_t p = 0; p < order.size(); ++p) {
    const auto idx = order[p];
    assigned[p % static_cast<std::size_t>(n_folds)].push_back(
        {static_cast<std::int32_t>(idx / m.cols()), static_cast<std::int32_t>(idx % m.cols())});
  }
  std::vector<HoldoutSplit> folds;
  folds.reserve(assigned.size());
  for (auto& cells_in_fold : assigned) folds.push_back(make_holdout(m, std::move(cells_in_fold)));
  return folds;
}

}  // namespace epm
