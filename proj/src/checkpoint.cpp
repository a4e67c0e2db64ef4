#include "epm/checkpoint.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace epm {

namespace {

constexpr const char* kMagic = "epm-checkpoint";

[[noreturn]] void malformed(const std::string& what) {
  throw std::runtime_error("checkpoint: malformed " + what);
}

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word) malformed("section '" + word + "'");
}

template <class T>
T read(std::istream& in, const char* what) {
  T v;
  if (!(in >> v)) malformed(what);
  return v;
}

void write_header(std::ostream& out, const char* kind) {
  out << kMagic << ' ' << kCheckpointVersion << ' ' << kind << '\n' << std::setprecision(17);
}

void read_header(std::istream& in, const std::string& kind) {
  expect(in, kMagic);
  if (read<int>(in, "version") != kCheckpointVersion) malformed("version (unsupported)");
  expect(in, kind);
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
    out << '\n';
  }
}

void read_matrix(std::istream& in, Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = read<double>(in, "matrix entry");
  }
}

void write_rng(std::ostream& out, const Rng& rng) {
  out << "rng ";
  rng.save(out);
  out << "\nend\n";
}

void read_rng(std::istream& in, Rng& rng) {
  expect(in, "rng");
  rng.load(in);
  expect(in, "end");
}

}  // namespace

void save_checkpoint(std::ostream& out, const TruncatedState& s) {
  const auto& h = s.hypers;
  write_header(out, "truncated");
  out << "variant " << to_string(h.variant) << '\n';
  out << "shape " << s.rows() << ' ' << s.cols() << ' ' << s.T << '\n';
  out << "hypers " << h.a1 << ' ' << h.a2 << ' ' << h.b1 << ' ' << h.b2 << ' ' << h.C1 << ' '
      << h.C2 << ' ' << h.alpha1 << ' ' << h.alpha2 << ' ' << h.gamma0 << ' ' << h.c0 << ' '
      << h.e0 << ' ' << h.f0 << '\n';
  out << "lambda";
  for (Eigen::Index k = 0; k < s.lambda.size(); ++k) out << ' ' << s.lambda[k];
  out << "\nrow_factors\n";
  write_matrix(out, s.row_factors);
  out << "col_factors\n";
  write_matrix(out, s.col_factors);
  out << "edges " << s.counts.edges() << '\n';
  for (std::size_t e = 0; e < s.counts.edges(); ++e) {
    const Cell c = s.counts.cell(e);
    out << c.row << ' ' << c.col << ' ' << s.counts.edge_total(e);
    const auto per = s.counts.edge(e);
    for (std::size_t k = 0; k < per.size(); ++k) {
      if (per[k] != 0) out << ' ' << k << ':' << per[k];
    }
    out << '\n';
  }
  write_rng(out, s.rng);
}

TruncatedState load_truncated_checkpoint(std::istream& in) {
  read_header(in, "truncated");
  TruncatedState s;
  auto& h = s.hypers;
  expect(in, "variant");
  h.variant = parse_variant(read<std::string>(in, "variant"));
  expect(in, "shape");
  const int I = read<int>(in, "rows"), J = read<int>(in, "cols");
  s.T = read<int>(in, "T");
  if (I < 0 || J < 0 || s.T < 1) malformed("shape");
  expect(in, "hypers");
  for (double* v : {&h.a1, &h.a2, &h.b1, &h.b2, &h.C1, &h.C2, &h.alpha1, &h.alpha2, &h.gamma0,
                    &h.c0, &h.e0, &h.f0}) {
    *v = read<double>(in, "hyperparameter");
  }
  h.validate();
  expect(in, "lambda");
  s.lambda.resize(s.T);
  for (int k = 0; k < s.T; ++k) s.lambda[k] = read<double>(in, "lambda");
  expect(in, "row_factors");
  s.row_factors.resize(I, s.T);
  read_matrix(in, s.row_factors);
  expect(in, "col_factors");
  s.col_factors.resize(J, s.T);
  read_matrix(in, s.col_factors);
  expect(in, "edges");
  const auto E = read<std::size_t>(in, "edge count");
  std::vector<Cell> cells(E);
  std::vector<std::vector<count_t>> per(E, std::vector<count_t>(static_cast<std::size_t>(s.T), 0));
  std::string line;
  std::getline(in, line);
  for (std::size_t e = 0; e < E; ++e) {
    if (!std::getline(in, line)) malformed("edge line");
    std::istringstream ls(line);
    cells[e].row = read<std::int32_t>(ls, "edge row");
    cells[e].col = read<std::int32_t>(ls, "edge col");
    const auto total = read<count_t>(ls, "edge total");
    count_t sum = 0;
    std::string tok;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) malformed("edge atom entry");
      const int k = std::stoi(tok.substr(0, colon));
      if (k < 0 || k >= s.T) malformed("edge atom index");
      per[e][static_cast<std::size_t>(k)] = std::stoll(tok.substr(colon + 1));
      sum += per[e][static_cast<std::size_t>(k)];
    }
    if (sum != total) malformed("edge total");
  }
  const BinaryMatrix x(I, J, cells);
  if (x.ones() != cells) malformed("edge order");
  s.counts = LatentCounts(x, s.T);
  for (std::size_t e = 0; e < E; ++e) s.counts.set_edge(e, per[e]);
  read_rng(in, s.rng);
  return s;
}

void save_checkpoint(std::ostream& out, const CollapsedState& s) {
  const auto& h = s.hypers;
  write_header(out, "collapsed");
  out << "shape " << s.rows << ' ' << s.cols << '\n';
  out << "hypers " << h.alpha1 << ' ' << h.alpha2 << ' ' << h.gamma0 << ' ' << h.c0 << ' ' << h.e0
      << ' ' << h.f0 << '\n';
  out << "atoms " << s.atoms.size() << ' ' << s.next_id << '\n';
  for (std::size_t k = 0; k < s.atoms.size(); ++k) out << (k ? " " : "") << s.atoms[k].id;
  out << '\n';
  out << "edges " << s.cells.size() << '\n';
  for (std::size_t e = 0; e < s.cells.size(); ++e) {
    out << s.cells[e].row << ' ' << s.cells[e].col << ' ' << s.edge_total(e);
    for (std::size_t c = s.offsets[e]; c < s.offsets[e + 1]; ++c) out << ' ' << s.labels[c];
    out << '\n';
  }
  const auto& p = s.params;
  out << "params " << p.ids.size() << ' ' << p.lambda_rest << '\n';
  for (std::size_t k = 0; k < p.ids.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out << p.ids[k] << ' ' << p.lambda[kk];
    for (Eigen::Index i = 0; i < p.phi.rows(); ++i) out << ' ' << p.phi(i, kk);
    for (Eigen::Index j = 0; j < p.psi.rows(); ++j) out << ' ' << p.psi(j, kk);
    out << '\n';
  }
  write_rng(out, s.rng);
}

CollapsedState load_collapsed_checkpoint(std::istream& in) {
  read_header(in, "collapsed");
  CollapsedState s;
  auto& h = s.hypers;
  expect(in, "shape");
  s.rows = read<int>(in, "rows");
  s.cols = read<int>(in, "cols");
  if (s.rows < 0 || s.cols < 0) malformed("shape");
  expect(in, "hypers");
  for (double* v : {&h.alpha1, &h.alpha2, &h.gamma0, &h.c0, &h.e0, &h.f0}) {
    *v = read<double>(in, "hyperparameter");
  }
  h.validate();
  expect(in, "atoms");
  const auto K = read<std::size_t>(in, "atom count");
  s.next_id = read<std::int64_t>(in, "next id");
  s.slot_of_id.assign(static_cast<std::size_t>(s.next_id), -1);
  for (std::size_t k = 0; k < K; ++k) {
    Atom a;
    a.id = read<std::int64_t>(in, "atom id");
    if (a.id < 0 || a.id >= s.next_id || s.slot_of_id[static_cast<std::size_t>(a.id)] >= 0) {
      malformed("atom id");
    }
    a.row_counts.assign(static_cast<std::size_t>(s.rows), 0);
    a.col_counts.assign(static_cast<std::size_t>(s.cols), 0);
    s.slot_of_id[static_cast<std::size_t>(a.id)] = static_cast<std::int32_t>(k);
    s.atoms.push_back(std::move(a));
  }
  expect(in, "edges");
  const auto E = read<std::size_t>(in, "edge count");
  s.offsets.push_back(0);
  for (std::size_t e = 0; e < E; ++e) {
    Cell c;
    c.row = read<std::int32_t>(in, "edge row");
    c.col = read<std::int32_t>(in, "edge col");
    if (c.row < 0 || c.row >= s.rows || c.col < 0 || c.col >= s.cols) malformed("edge cell");
    if (!s.cells.empty() && !(s.cells.back() < c)) malformed("edge order");
    s.cells.push_back(c);
    const auto n = read<count_t>(in, "customer count");
    for (count_t t = 0; t < n; ++t) {
      const auto id = read<std::int64_t>(in, "customer label");
      if (id < 0 || id >= s.next_id || s.slot_of_id[static_cast<std::size_t>(id)] < 0) {
        malformed("customer label");
      }
      s.labels.push_back(id);
    }
    s.offsets.push_back(s.labels.size());
  }
  const std::size_t before = s.atoms.size();
  rebuild_statistics(s);
  if (s.atoms.size() != before) malformed("atoms (empty atom listed)");

  expect(in, "params");
  auto& p = s.params;
  const auto Kp = read<std::size_t>(in, "parameter count");
  p.lambda_rest = read<double>(in, "lambda_rest");
  const auto kp = static_cast<Eigen::Index>(Kp);
  p.ids.resize(Kp);
  p.lambda.resize(kp);
  p.phi.resize(s.rows, kp);
  p.psi.resize(s.cols, kp);
  for (Eigen::Index k = 0; k < kp; ++k) {
    p.ids[static_cast<std::size_t>(k)] = read<std::int64_t>(in, "parameter id");
    p.lambda[k] = read<double>(in, "parameter lambda");
    for (Eigen::Index i = 0; i < p.phi.rows(); ++i) p.phi(i, k) = read<double>(in, "phi");
    for (Eigen::Index j = 0; j < p.psi.rows(); ++j) p.psi(j, k) = read<double>(in, "psi");
  }
  read_rng(in, s.rng);
  return s;
}

std::string checkpoint_kind(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  std::string magic, kind;
  int version = 0;
  if (!(in >> magic >> version >> kind) || magic != kMagic) malformed("header");
  return kind;
}

void save_checkpoint_file(const std::string& path, const TruncatedState& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  save_checkpoint(out, s);
}

void save_checkpoint_file(const std::string& path, const CollapsedState& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  save_checkpoint(out, s);
}

}  // namespace epm
