#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "epm/eval.hpp"

using namespace epm;

namespace {

// Every distinct score is a threshold; the curve point at threshold t counts
// everything scored >= t.
double brute_force_pr_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
  std::vector<double> thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  const double pos = std::count(labels.begin(), labels.end(), 1);
  std::vector<std::pair<double, double>> pts;  // recall, precision
  for (double t : thresholds) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) (labels[i] ? tp : fp) += 1;
    }
    pts.emplace_back(tp / pos, tp / (tp + fp));
  }
  double area = 0.0, r0 = 0.0, p0 = pts.front().second;
  for (auto [r, p] : pts) {
    area += (r - r0) * (p + p0) / 2;
    r0 = r;
    p0 = p;
  }
  return area;
}

std::vector<TestEntry> entries_with(std::vector<std::uint8_t> values) {
  std::vector<TestEntry> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back({0, static_cast<std::int32_t>(i), values[i]});
  return out;
}

}  // namespace

TEST(Tdll, AllHalf) {
  const auto test = entries_with({1, 0, 1, 1});
  PredictiveEnsemble ens(4);
  ens.add_sample(std::vector<double>(4, 0.5));
  EXPECT_NEAR(tdll(ens, test), std::log(0.5), 1e-12);
}

TEST(Tdll, PerfectPredictionIsClampedNearZero) {
  const auto test = entries_with({1, 0});
  PredictiveEnsemble ens(2);
  ens.add_sample(std::vector<double>{1.0, 0.0});
  EXPECT_NEAR(tdll(ens, test), std::log1p(-kProbClamp), 1e-15);
}

TEST(Tdll, SampleMeanThenLog) {
  const auto test = entries_with({1});
  PredictiveEnsemble ens(1);
  ens.add_sample(std::vector<double>{0.2});
  ens.add_sample(std::vector<double>{0.6});
  EXPECT_NEAR(tdll(ens, test), -0.916290731874155, 1e-12);
  EXPECT_NEAR(tdll(ens, test, TdllMode::mean_log), 0.5 * (std::log(0.2) + std::log(0.6)), 1e-12);
}

TEST(Tdll, ZeroProbabilityForObservedOneIsClamped) {
  const auto test = entries_with({1});
  PredictiveEnsemble ens(1);
  ens.add_sample(std::vector<double>{0.0});
  EXPECT_NEAR(tdll(ens, test), std::log(kProbClamp), 1e-9);
}

TEST(Tdll, InvariantToOrder) {
  Rng r(3);
  const auto test = entries_with({1, 0, 0, 1, 1});
  std::vector<std::vector<double>> samples(4, std::vector<double>(5));
  for (auto& s : samples) for (auto& p : s) p = r.uniform();
  PredictiveEnsemble a(5), b(5);
  for (const auto& s : samples) a.add_sample(s);
  for (auto it = samples.rbegin(); it != samples.rend(); ++it) b.add_sample(*it);
  EXPECT_NEAR(tdll(a, test), tdll(b, test), 1e-14);
  // reverse the entries too
  std::vector<TestEntry> rev(test.rbegin(), test.rend());
  PredictiveEnsemble c(5);
  for (const auto& s : samples) c.add_sample(std::vector<double>(s.rbegin(), s.rend()));
  EXPECT_NEAR(tdll(a, test), tdll(c, rev), 1e-14);
}

TEST(Tdll, Errors) {
  const auto test = entries_with({1});
  PredictiveEnsemble empty(1);
  EXPECT_THROW(tdll(empty, test), std::invalid_argument);
  PredictiveEnsemble ens(1);
  EXPECT_THROW(ens.add_sample(std::vector<double>{1.5}), std::invalid_argument);
  EXPECT_THROW(ens.add_sample(std::vector<double>{0.1, 0.2}), std::invalid_argument);
}

TEST(PrAuc, PerfectRanking) {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.1};
  const std::vector<std::uint8_t> l{1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(pr_auc(s, l), 1.0);
}

TEST(PrAuc, AllTiedEqualsPrevalence) {
  const std::vector<double> s(10, 0.4);
  const std::vector<std::uint8_t> l{1, 0, 0, 1, 0, 0, 1, 0, 0, 0};
  EXPECT_NEAR(pr_auc(s, l), 0.3, 1e-15);
}

TEST(PrAuc, NoPositivesThrows) {
  const std::vector<double> s{0.1, 0.2};
  const std::vector<std::uint8_t> l{0, 0};
  EXPECT_THROW(pr_auc(s, l), std::invalid_argument);
}

TEST(PrAuc, MatchesBruteForceOnSmallInstances) {
  Rng r(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(r.uniform() * 8);
    std::vector<double> s(n);
    std::vector<std::uint8_t> l(n);
    for (int i = 0; i < n; ++i) {
      s[i] = std::floor(r.uniform() * 4) / 4;  // coarse grid forces ties
      l[i] = r.uniform() < 0.5;
    }
    if (std::count(l.begin(), l.end(), 1) == 0) l[0] = 1;
    ASSERT_NEAR(pr_auc(s, l), brute_force_pr_auc(s, l), 1e-12);
  }
}

TEST(PrAuc, InvariantUnderMonotoneTransform) {
  Rng r(18);
  std::vector<double> s(50), t(50);
  std::vector<std::uint8_t> l(50);
  for (int i = 0; i < 50; ++i) {
    s[i] = r.uniform();
    t[i] = std::exp(3 * s[i]) - 7;
    l[i] = r.uniform() < 0.3;
  }
  l[0] = 1;
  EXPECT_NEAR(pr_auc(s, l), pr_auc(t, l), 1e-15);
}

TEST(PrAuc, ReversedPerfectRankingIsMinimum) {
  for (int n = 2; n <= 8; ++n) {
    for (int pos = 1; pos < n; ++pos) {
      std::vector<double> s(n);
      std::iota(s.begin(), s.end(), 0.0);  // ascending: highest score last
      std::vector<std::uint8_t> l(n, 0);
      for (int i = 0; i < pos; ++i) l[i] = 1;  // positives at the bottom
      double lowest = 2.0;
      std::vector<std::uint8_t> perm = l;
      std::sort(perm.begin(), perm.end());
      do {
        lowest = std::min(lowest, brute_force_pr_auc(s, perm));
      } while (std::next_permutation(perm.begin(), perm.end()));
      EXPECT_NEAR(pr_auc(s, l), lowest, 1e-12) << "n=" << n << " pos=" << pos;
    }
  }
}

TEST(Predictive, HandTwoAtomCollapsedState) {
  CollapsedState s;
  s.rows = 2;
  s.cols = 2;
  s.params.ids = {0, 1};
  s.params.phi.resize(2, 2);
  s.params.phi << 0.3, 0.9, 0.7, 0.1;
  s.params.psi.resize(2, 2);
  s.params.psi << 0.5, 0.2, 0.5, 0.8;
  s.params.lambda.resize(2);
  s.params.lambda << 2.0, 4.0;
  const std::vector<TestEntry> entries{{0, 1, 1}, {1, 0, 0}};
  const auto ens = posterior_predictive(std::vector<CollapsedState>{s}, entries);
  ASSERT_EQ(ens.samples(), 1u);
  EXPECT_NEAR(ens.prob(0, 0), 1 - std::exp(-(0.3 * 0.5 * 2 + 0.9 * 0.8 * 4)), 1e-12);
  EXPECT_NEAR(ens.prob(0, 1), 1 - std::exp(-(0.7 * 0.5 * 2 + 0.1 * 0.2 * 4)), 1e-12);
}

TEST(Predictive, DuplicatedStateGivesIdenticalSamples) {
  const BinaryMatrix x(3, 3, {{0, 0}, {1, 2}, {2, 1}});
  auto st = init_state(x, 4, Hyperparameters::defaults(Variant::depm, 3, 3), Rng(2));
  const std::vector<TestEntry> entries{{0, 0, 1}, {0, 1, 0}, {2, 2, 0}};
  const auto ens = posterior_predictive(std::vector<TruncatedState>{st, st}, entries);
  ASSERT_EQ(ens.samples(), 2u);
  for (std::size_t e = 0; e < 3; ++e) {
    EXPECT_EQ(ens.prob(0, e), ens.prob(1, e));
    EXPECT_NEAR(ens.prob(0, e), link_probability(st, entries[e].row, entries[e].col), 0.0);
  }
}

TEST(TraceCsv, RowsAndSummary) {
  EvalReport r;
  r.k_mean = 4.5;
  r.tdll = -0.2;
  r.tdauc_pr = 0.9;
  for (int i = 1; i <= 3; ++i) r.trace.push_back({i, 0.5 * i, 4, -0.3, -0.31});
  std::ostringstream out;
  write_trace_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "iteration,elapsed_s,K,TDLL_running,TDLL_sample");
  EXPECT_EQ(lines[4].rfind("summary,1.500000,4.5,-0.2,0.9", 0), 0u);
}
