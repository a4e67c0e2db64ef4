#include "epm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "epm/distributions.hpp"
#include "epm/idepm.hpp"
#include "epm/truncated.hpp"

namespace epm {

ExpectationCheck make_check(std::string name, double analytic, double estimate, double se,
                            std::int64_t n, double tolerance_se) {
  ExpectationCheck c;
  c.name = std::move(name);
  c.analytic = analytic;
  c.estimate = estimate;
  c.se = se;
  c.n = n;
  c.tolerance_se = tolerance_se;
  c.pass = std::abs(estimate - analytic) <= tolerance_se * se;
  return c;
}

namespace {

struct Running {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double se() const { return std::sqrt(variance() / static_cast<double>(n)); }
};

// Visits the weights of T iid Gamma(shape, c0) atoms, skipping those that are
// certain to lie below `floor`. For shape < 1 a weight is G * U^(1/shape) / c0
// with G ~ Gamma(shape + 1); it is skipped when U^(1/shape) * kCap < floor * c0, an
// event of probability q per atom, so the kept count is Binomial(T, 1 - q) and
// kept atoms have U uniform on (q, 1).
template <class F>
void for_each_weight(Rng& rng, int T, double shape, double c0, double floor, F&& visit) {
  constexpr double kCap = 64.0;
  if (shape >= 1.0) {
    for (int k = 0; k < T; ++k) visit(sample_gamma(rng, shape, c0));
    return;
  }
  const double q = std::exp(shape * std::log(floor * c0 / kCap));
  std::binomial_distribution<int> binom(T, 1.0 - q);
  const int kept = binom(rng.engine());
  for (int r = 0; r < kept; ++r) {
    const double u = q + (1.0 - q) * rng.uniform();
    const double g = rng.gamma_unit(shape + 1.0);
    visit(g * std::exp(std::log(u) / shape) / c0);
  }
}

double dirichlet_coordinate(Rng& rng, int n, double alpha) {
  if (n == 1) return 1.0;
  return sample_beta(rng, alpha, (n - 1) * alpha);
}

}  // namespace

ExpectationCheck mc_intensity_expectation_epm(const EpmPrior& p, std::int64_t n, Rng& rng) {
  if (n < 2 || p.T < 1) throw std::invalid_argument("mc expectation: need n >= 2 and T >= 1");
  const double analytic = (p.a1 / p.b1) * (p.a2 / p.b2) * (p.gamma0 / p.c0);
  const double floor = kNegligibleWeight / p.c0;
  Running acc;
  for (std::int64_t s = 0; s < n; ++s) {
    double sum = 0.0;
    for_each_weight(rng, p.T, p.gamma0 / p.T, p.c0, floor, [&](double lambda) {
      sum += sample_gamma(rng, p.a1, p.b1) * sample_gamma(rng, p.a2, p.b2) * lambda;
    });
    acc.add(sum);
  }
  return make_check("epm_intensity", analytic, acc.mean, acc.se(), n);
}

ExpectationCheck mc_intensity_expectation_depm(int rows, int cols, double gamma0, double c0,
                                               std::int64_t n, Rng& rng, int T, double alpha1,
                                               double alpha2) {
  if (n < 2 || T < 1 || rows < 1 || cols < 1) {
    throw std::invalid_argument("mc expectation: invalid arguments");
  }
  const double analytic = gamma0 / (static_cast<double>(rows) * cols * c0);
  const double floor = kNegligibleWeight / c0;
  Running acc;
  for (std::int64_t s = 0; s < n; ++s) {
    double sum = 0.0;
    for_each_weight(rng, T, gamma0 / T, c0, floor, [&](double lambda) {
      sum += dirichlet_coordinate(rng, rows, alpha1) * dirichlet_coordinate(rng, cols, alpha2) *
             lambda;
    });
    acc.add(sum);
  }
  return make_check("depm_intensity", analytic, acc.mean, acc.se(), n);
}

ExpectationCheck verify_marginal_by_prior_mc(const CountTable& table, int T,
                                             const IdepmHypers& h, std::int64_t n, Rng& rng) {
  h.validate();
  table.validate();
  // Active atoms take labels 0..K-1 in table order.
  std::vector<const std::vector<CountEntry>*> active;
  for (const auto& atom : table.atoms) {
    count_t total = 0;
    for (const auto& e : atom) total += e.count;
    if (total > 0) active.push_back(&atom);
  }
  const int K = static_cast<int>(active.size());
  if (K > T) throw std::invalid_argument("prior mc: more active atoms than T");
  const double closed = log_marginal_likelihood_truncated(table, T, h, false);

  std::vector<count_t> cell_total(static_cast<std::size_t>(table.rows) * table.cols, 0);
  for (const auto* atom : active) {
    for (const auto& e : *atom) cell_total[static_cast<std::size_t>(e.row) * table.cols + e.col] += e.count;
  }
  double log_front = 0.0;
  for (count_t m : cell_total) log_front -= log_gamma_fn(static_cast<double>(m) + 1.0);

  const std::vector<double> a1(static_cast<std::size_t>(table.rows), h.alpha1);
  const std::vector<double> a2(static_cast<std::size_t>(table.cols), h.alpha2);
  std::vector<double> phi(a1.size()), psi(a2.size());
  const double share = h.gamma0 / T;
  // Rescaled by exp(-closed) so the averaged quantity is O(1).
  Running acc;
  for (std::int64_t s = 0; s < n; ++s) {
    double log_l = log_front;
    for (int k = 0; k < T; ++k) {
      const double lambda = sample_gamma(rng, share, h.c0);
      log_l -= lambda;
      if (k >= K) continue;
      sample_dirichlet(rng, a1, phi);
      sample_dirichlet(rng, a2, psi);
      for (const auto& e : *active[static_cast<std::size_t>(k)]) {
        if (e.count == 0) continue;
        log_l += static_cast<double>(e.count) *
                 (std::log(phi[e.row]) + std::log(psi[e.col]) + std::log(lambda));
      }
    }
    acc.add(std::exp(log_l - closed));
  }
  return make_check("prior_integration", 1.0, acc.mean, acc.se(), n);
}

LimitReport verify_partition_limit(const CountTable& table, const IdepmHypers& hypers,
                                   const std::vector<std::int64_t>& ladder, double tolerance) {
  LimitReport r;
  r.log_p_infinite = log_marginal_likelihood(table, hypers);
  double prev = std::numeric_limits<double>::infinity();
  r.monotone = true;
  for (std::int64_t T : ladder) {
    const double lp = log_marginal_likelihood_truncated(table, T, hypers, true);
    const double err = std::abs(lp - r.log_p_infinite);
    r.ladder.push_back({T, lp, err});
    if (err > prev) r.monotone = false;
    prev = err;
  }
  r.final_error = r.ladder.empty() ? 0.0 : r.ladder.back().abs_error;
  r.pass = r.monotone && r.final_error < tolerance;
  return r;
}

namespace {

struct Monitor {
  std::string name;
  double mean;
  double var;
  std::vector<double> values;
};

GewekeStat summarize(const Monitor& m, int batches) {
  GewekeStat st;
  st.name = m.name;
  st.prior_mean = m.mean;
  st.prior_var = m.var;
  const std::size_t n = m.values.size();
  const std::size_t len = n / static_cast<std::size_t>(batches);
  Running first, second, all_first, all_second;
  for (int b = 0; b < batches; ++b) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t t = b * len; t < (b + 1) * len; ++t) {
      const double d = m.values[t] - m.mean;
      s1 += m.values[t];
      s2 += d * d;
    }
    first.add(s1 / static_cast<double>(len));
    second.add(s2 / static_cast<double>(len));
  }
  st.sample_mean = first.mean;
  st.sample_var = second.mean;
  st.z_mean = (first.mean - m.mean) / first.se();
  st.z_var = (second.mean - m.var) / second.se();
  return st;
}

double gamma_pit(double x, double shape, double rate) {
  return boost::math::gamma_p(shape, rate * x);
}

double beta_pit(double x, double a, double b) { return boost::math::ibeta(a, b, x); }

void corrupt_c0(Rng& rng, double& c0, double e0, double f0, double gamma0, double mass) {
  c0 = sample_gamma(rng, e0 + gamma0, 2.0 * (f0 + mass));
}

BinaryMatrix regenerate(const TruncatedState& s, Rng& rng) {
  std::vector<Cell> ones;
  for (int i = 0; i < s.rows(); ++i) {
    for (int j = 0; j < s.cols(); ++j) {
      if (rng.uniform() < link_probability(s, i, j)) ones.push_back({i, j});
    }
  }
  return BinaryMatrix(s.rows(), s.cols(), std::move(ones));
}

std::vector<Monitor> run_truncated(Variant v, const GewekeOptions& o, Rng& rng) {
  Hyperparameters h = Hyperparameters::defaults(v, o.rows, o.cols);
  h.e0 = o.e0;
  h.f0 = o.f0;
  const double pm = o.e0 / o.f0, pv = o.e0 / (o.f0 * o.f0);
  TruncatedState s =
      init_state(BinaryMatrix(o.rows, o.cols), o.T, h, rng.split(1), HyperInit::prior_draw);
  std::vector<Monitor> mon;
  auto add = [&](std::string name, double mean, double var) {
    mon.push_back({std::move(name), mean, var, {}});
    mon.back().values.reserve(static_cast<std::size_t>(o.rounds));
  };
  if (v == Variant::depm) {
    add("alpha1", pm, pv);
    add("alpha2", pm, pv);
  } else {
    add("a1", pm, pv);
    add("a2", pm, pv);
    add("b1", pm, pv);
    add("b2", pm, pv);
  }
  add("gamma0", pm, pv);
  add("c0", pm, pv);
  add("pit_row_factor", 0.5, 1.0 / 12.0);
  add("pit_col_factor", 0.5, 1.0 / 12.0);
  add("pit_lambda", 0.5, 1.0 / 12.0);

  for (std::int64_t r = 0; r < o.rounds; ++r) {
    const BinaryMatrix x = regenerate(s, s.rng);
    gibbs_sweep(s, x);
    auto& hp = s.hypers;
    if (o.corrupt) corrupt_c0(s.rng, hp.c0, hp.e0, hp.f0, hp.gamma0, s.lambda.sum());
    std::size_t c = 0;
    if (v == Variant::depm) {
      mon[c++].values.push_back(hp.alpha1);
      mon[c++].values.push_back(hp.alpha2);
    } else {
      mon[c++].values.push_back(hp.a1);
      mon[c++].values.push_back(hp.a2);
      mon[c++].values.push_back(hp.b1);
      mon[c++].values.push_back(hp.b2);
    }
    mon[c++].values.push_back(hp.gamma0);
    mon[c++].values.push_back(hp.c0);
    if (v == Variant::depm) {
      mon[c++].values.push_back(
          o.rows == 1 ? 0.5 : beta_pit(s.row_factors(0, 0), hp.alpha1, (o.rows - 1) * hp.alpha1));
      mon[c++].values.push_back(
          o.cols == 1 ? 0.5 : beta_pit(s.col_factors(0, 0), hp.alpha2, (o.cols - 1) * hp.alpha2));
    } else {
      mon[c++].values.push_back(gamma_pit(s.row_factors(0, 0), hp.a1, hp.b1));
      mon[c++].values.push_back(gamma_pit(s.col_factors(0, 0), hp.a2, hp.b2));
    }
    mon[c++].values.push_back(gamma_pit(s.lambda[0], hp.gamma0 / o.T, hp.c0));
  }
  return mon;
}

// Exact draw of (m, z) from the infinite model given its hyperparameters.
CountTable draw_idepm_prior(const IdepmHypers& h, int rows, int cols, Rng& rng) {
  const double mass = sample_gamma(rng, h.gamma0, h.c0);
  const count_t M = sample_poisson(rng, mass);
  std::vector<count_t> sizes;
  std::vector<double> w;
  for (count_t c = 0; c < M; ++c) {
    w.assign(sizes.begin(), sizes.end());
    w.push_back(h.gamma0);
    const double total = static_cast<double>(c) + h.gamma0;
    const std::size_t k = sample_categorical(rng, w, total);
    if (k == sizes.size()) sizes.push_back(0);
    ++sizes[k];
  }
  CountTable t;
  t.rows = rows;
  t.cols = cols;
  const std::vector<double> a1(static_cast<std::size_t>(rows), h.alpha1);
  const std::vector<double> a2(static_cast<std::size_t>(cols), h.alpha2);
  std::vector<double> phi(a1.size()), psi(a2.size());
  for (count_t size : sizes) {
    sample_dirichlet(rng, a1, phi);
    sample_dirichlet(rng, a2, psi);
    std::vector<count_t> cells(static_cast<std::size_t>(rows) * cols, 0);
    for (count_t c = 0; c < size; ++c) {
      const auto i = sample_categorical(rng, phi, 1.0);
      const auto j = sample_categorical(rng, psi, 1.0);
      ++cells[i * static_cast<std::size_t>(cols) + j];
    }
    std::vector<CountEntry> atom;
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const count_t m = cells[static_cast<std::size_t>(i) * cols + j];
        if (m > 0) atom.push_back({i, j, m});
      }
    }
    t.atoms.push_back(std::move(atom));
  }
  return t;
}

std::vector<Monitor> run_idepm(const GewekeOptions& o, Rng& rng) {
  IdepmHypers h;
  h.e0 = o.e0;
  h.f0 = o.f0;
  Rng work = rng.split(2);
  h.alpha1 = sample_gamma(work, h.e0, h.f0);
  h.alpha2 = sample_gamma(work, h.e0, h.f0);
  h.gamma0 = sample_gamma(work, h.e0, h.f0);
  h.c0 = sample_gamma(work, h.e0, h.f0);
  const double pm = o.e0 / o.f0, pv = o.e0 / (o.f0 * o.f0);
  std::vector<Monitor> mon = {
      {"alpha1", pm, pv, {}}, {"alpha2", pm, pv, {}}, {"gamma0", pm, pv, {}}, {"c0", pm, pv, {}}};
  for (auto& m : mon) m.values.reserve(static_cast<std::size_t>(o.rounds));
  for (std::int64_t r = 0; r < o.rounds; ++r) {
    const CountTable table = draw_idepm_prior(h, o.rows, o.cols, work);
    CollapsedState s = collapsed_from_table(table, h, std::move(work));
    sample_assignments(s);
    sample_hypers_idepm(s);
    if (o.corrupt) {
      double lam = sample_gamma(s.rng, s.hypers.gamma0, s.hypers.c0 + 1.0);
      for (const Atom& a : s.atoms) {
        lam += sample_gamma(s.rng, static_cast<double>(a.total), s.hypers.c0 + 1.0);
      }
      corrupt_c0(s.rng, s.hypers.c0, h.e0, h.f0, s.hypers.gamma0, lam);
    }
    h = s.hypers;
    work = std::move(s.rng);
    mon[0].values.push_back(h.alpha1);
    mon[1].values.push_back(h.alpha2);
    mon[2].values.push_back(h.gamma0);
    mon[3].values.push_back(h.c0);
  }
  return mon;
}

}  // namespace

GewekeReport geweke_joint_test(const std::string& model, const GewekeOptions& o, Rng& rng) {
  if (o.rounds < o.batches * 2 || o.batches < 2) {
    throw std::invalid_argument("geweke: need at least two rounds per batch");
  }
  GewekeReport rep;
  rep.model = model;
  rep.options = o;
  std::vector<Monitor> mon;
  if (model == "idepm") {
    mon = run_idepm(o, rng);
  } else {
    const Variant v = parse_variant(model);
    if (v == Variant::cepm) {
      throw std::invalid_argument("geweke: the grid shape prior is discrete; use epm, depm or idepm");
    }
    mon = run_truncated(v, o, rng);
  }
  rep.pass = true;
  for (const Monitor& m : mon) {
    rep.stats.push_back(summarize(m, o.batches));
    const auto& st = rep.stats.back();
    rep.max_abs_z = std::max({rep.max_abs_z, std::abs(st.z_mean), std::abs(st.z_var)});
  }
  rep.pass = rep.max_abs_z <= o.z_limit;
  return rep;
}

void write_checks_csv(std::ostream& out, const std::vector<ExpectationCheck>& checks) {
  out << "name,analytic,estimate,se,z,n,pass\n" << std::setprecision(10);
  for (const auto& c : checks) {
    out << c.name << ',' << c.analytic << ',' << c.estimate << ',' << c.se << ',' << c.z() << ','
        << c.n << ',' << (c.pass ? 1 : 0) << '\n';
  }
}

void write_checks_text(std::ostream& out, const std::vector<ExpectationCheck>& checks) {
  out << std::setprecision(6);
  for (const auto& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": analytic " << c.analytic << ", estimate "
        << c.estimate << " +/- " << c.se << " (z = " << c.z() << ", n = " << c.n << ")\n";
  }
}

void write_limit_text(std::ostream& out, const std::string& name, const LimitReport& r) {
  out << (r.pass ? "PASS " : "FAIL ") << name << ": log P_inf = " << std::setprecision(12)
      << r.log_p_infinite << (r.monotone ? ", monotone" : ", NOT monotone") << '\n';
  for (const auto& p : r.ladder) {
    out << "  T = " << p.T << "  log P_T = " << p.log_p << "  |error| = " << std::setprecision(3)
        << p.abs_error << std::setprecision(12) << '\n';
  }
}

void write_geweke_csv(std::ostream& out, const std::vector<GewekeReport>& reports) {
  out << "model,corrupt,rounds,stat,prior_mean,sample_mean,z_mean,prior_var,sample_var,z_var\n"
      << std::setprecision(8);
  for (const auto& r : reports) {
    for (const auto& s : r.stats) {
      out << r.model << ',' << (r.options.corrupt ? 1 : 0) << ',' << r.options.rounds << ','
          << s.name << ',' << s.prior_mean << ',' << s.sample_mean << ',' << s.z_mean << ','
          << s.prior_var << ',' << s.sample_var << ',' << s.z_var << '\n';
    }
  }
}

void write_geweke_text(std::ostream& out, const GewekeReport& r) {
  out << (r.pass ? "PASS " : "FAIL ") << "geweke " << r.model << (r.options.corrupt ? " (corrupted c0 update)" : "")
      << ": " << r.options.rounds << " rounds, max |z| = " << std::setprecision(4) << r.max_abs_z
      << '\n';
  for (const auto& s : r.stats) {
    out << "  " << std::left << std::setw(16) << s.name << std::right << " mean " << s.sample_mean
        << " vs " << s.prior_mean << " (z " << s.z_mean << "), var " << s.sample_var << " vs "
        << s.prior_var << " (z " << s.z_var << ")\n";
  }
}

std::vector<ExpectationCheck> expectation_suite(std::int64_t n, Rng& rng, int settings) {
  std::vector<ExpectationCheck> out;
  auto unif = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  for (int s = 0; s < settings; ++s) {
    EpmPrior p;
    p.a1 = unif(0.5, 3.0);
    p.b1 = unif(0.5, 3.0);
    p.a2 = unif(0.5, 3.0);
    p.b2 = unif(0.5, 3.0);
    p.gamma0 = unif(0.5, 1.5);
    p.c0 = unif(0.5, 2.0);
    Rng child = rng.split(static_cast<std::uint64_t>(s));
    auto c = mc_intensity_expectation_epm(p, n, child);
    std::ostringstream name;
    name << std::setprecision(3) << "epm_intensity[a1=" << p.a1 << ",b1=" << p.b1 << ",a2=" << p.a2
         << ",b2=" << p.b2 << ",gamma0=" << p.gamma0 << ",c0=" << p.c0 << "]";
    c.name = name.str();
    out.push_back(c);
  }
  for (int s = 0; s < settings; ++s) {
    const int rows = 1 + static_cast<int>(rng.uniform() * 10);
    const int cols = 1 + static_cast<int>(rng.uniform() * 10);
    const double alpha1 = unif(0.5, 2.0), alpha2 = unif(0.5, 2.0);
    const double gamma0 = unif(0.5, 1.5), c0 = unif(0.5, 2.0);
    Rng child = rng.split(100 + static_cast<std::uint64_t>(s));
    auto c = mc_intensity_expectation_depm(rows, cols, gamma0, c0, n, child, 1000, alpha1, alpha2);
    std::ostringstream name;
    name << std::setprecision(3) << "depm_intensity[I=" << rows << ",J=" << cols
         << ",alpha1=" << alpha1 << ",alpha2=" << alpha2 << ",gamma0=" << gamma0 << ",c0=" << c0
         << "]";
    c.name = name.str();
    out.push_back(c);
  }
  return out;
}

std::vector<ExpectationCheck> moment_suite(std::int64_t n, Rng& rng) {
  std::vector<ExpectationCheck> out;
  for (double lambda : {0.5, 3.0, 25.0}) {
    Running acc;
    for (std::int64_t s = 0; s < n; ++s) acc.add(static_cast<double>(sample_ztp(rng, lambda)));
    std::ostringstream name;
    name << "ztp_mean[lambda=" << lambda << "]";
    out.push_back(make_check(name.str(), lambda / -std::expm1(-lambda), acc.mean, acc.se(), n));
  }
  const std::pair<count_t, double> settings[] = {{3, 1.0}, {10, 0.5}, {50, 2.0}};
  for (const auto& [customers, a] : settings) {
    double analytic = 0.0;
    for (count_t p = 1; p <= customers; ++p) analytic += a / (a + static_cast<double>(p) - 1.0);
    Running acc;
    for (std::int64_t s = 0; s < n; ++s) {
      acc.add(static_cast<double>(sample_antoniak(rng, customers, a)));
    }
    std::ostringstream name;
    name << "antoniak_mean[n=" << customers << ",a=" << a << "]";
    out.push_back(make_check(name.str(), analytic, acc.mean, acc.se(), n));
  }
  return out;
}

bool MarginalSuite::pass() const {
  bool ok = hand_pass;
  for (const auto& c : prior_mc) ok = ok && c.pass;
  for (const auto& [name, r] : limits) ok = ok && r.pass;
  return ok;
}

MarginalSuite marginal_suite(std::int64_t n, Rng& rng) {
  MarginalSuite m;
  struct Instance {
    std::string name;
    CountTable table;
    int T;
    IdepmHypers h;
  };
  IdepmHypers skew;
  skew.alpha1 = 0.5;
  skew.alpha2 = 2.0;
  skew.gamma0 = 2.0;
  skew.c0 = 1.5;
  const std::vector<Instance> instances = {
      {"1x1_M1_T1", {1, 1, {{{0, 0, 1}}}}, 1, IdepmHypers{}},
      {"2x2_M4_T2", {2, 2, {{{0, 0, 2}, {1, 1, 1}}, {{0, 1, 1}}}}, 2, IdepmHypers{}},
      {"2x3_M6_T3", {2, 3, {{{0, 0, 2}, {1, 2, 1}}, {{0, 1, 1}}, {{1, 0, 2}}}}, 3, skew},
  };
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    Rng child = rng.split(i);
    auto c = verify_marginal_by_prior_mc(inst.table, inst.T, inst.h, n, child);
    c.name = "prior_integration[" + inst.name + "]";
    m.prior_mc.push_back(c);
  }
  IdepmHypers sparse;
  sparse.gamma0 = 0.5;
  m.limits.emplace_back("partition_limit[2x2,totals 3+1]",
                        verify_partition_limit({2, 2, {{{0, 0, 2}, {1, 1, 1}}, {{0, 1, 1}}}}, sparse));
  m.limits.emplace_back("partition_limit[1x2,totals 2+2]",
                        verify_partition_limit({1, 2, {{{0, 0, 2}}, {{0, 1, 2}}}}, sparse));
  m.hand_log_p = log_marginal_likelihood(CountTable{1, 1, {{{0, 0, 1}}}}, IdepmHypers{});
  m.hand_error = std::abs(m.hand_log_p - std::log(0.25));
  m.hand_pass = m.hand_error <= 1e-12;
  return m;
}

void write_marginal_text(std::ostream& out, const MarginalSuite& m) {
  write_checks_text(out, m.prior_mc);
  for (const auto& [name, r] : m.limits) write_limit_text(out, name, r);
  out << (m.hand_pass ? "PASS " : "FAIL ") << "single_customer: log P = " << std::setprecision(15)
      << m.hand_log_p << " vs ln(1/4), |error| = " << std::setprecision(3) << m.hand_error << '\n';
}

std::vector<GewekeReport> geweke_suite(std::int64_t rounds, bool corrupt, Rng& rng) {
  std::vector<GewekeReport> out;
  GewekeOptions o;
  o.rounds = rounds;
  o.corrupt = corrupt;
  std::uint64_t id = 0;
  for (const char* model : {"epm", "depm", "idepm"}) {
    Rng child = rng.split(id++);
    out.push_back(geweke_joint_test(model, o, child));
  }
  return out;
}

}  // namespace epm
