#include <gtest/gtest.h>

#include <cmath>

#include "epm/truncated.hpp"

using namespace epm;

namespace {

BinaryMatrix random_matrix(Rng& r, int rows, int cols, double density) {
  std::vector<Cell> ones;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (r.uniform() < density) ones.push_back({i, j});
  return BinaryMatrix(rows, cols, std::move(ones));
}

// Log of prod_{i,k} NB-marginal of m(i,.,k) with U integrated out, plus the
// Gamma(e0, f0) log density of a, for b = C a.
double cepm_rows_reference(const TruncatedState& s, double a) {
  const auto& h = s.hypers;
  const double b = h.C1 * a;
  double lp = 0.0;
  for (int k = 0; k < s.T; ++k) {
    const double S = s.col_factors.col(k).sum() * s.lambda[k];
    for (int i = 0; i < s.rows(); ++i) {
      const double m = static_cast<double>(s.counts.row_atom(i, k));
      lp += a * std::log(b) - std::lgamma(a) + std::lgamma(a + m) - (a + m) * std::log(b + S);
    }
  }
  return lp + (h.e0 - 1) * std::log(a) - h.f0 * a;
}

}  // namespace

TEST(Truncated, VariantNames) {
  for (auto v : {Variant::epm, Variant::cepm, Variant::depm}) EXPECT_EQ(parse_variant(to_string(v)), v);
  EXPECT_THROW(parse_variant("idepm"), std::invalid_argument);
}

TEST(Truncated, CepmDefaultsPinConstraint) {
  const auto h = Hyperparameters::defaults(Variant::cepm, 7, 9);
  EXPECT_DOUBLE_EQ(h.C1, 7.0);
  EXPECT_DOUBLE_EQ(h.C2, 9.0);
  EXPECT_DOUBLE_EQ(h.b1, h.C1 * h.a1);
  EXPECT_DOUBLE_EQ(h.b2, h.C2 * h.a2);
}

TEST(Truncated, LinkProbabilityHandValue) {
  const BinaryMatrix x(1, 1, {{0, 0}});
  auto s = init_state(x, 2, Hyperparameters::defaults(Variant::epm, 1, 1), Rng(1));
  s.row_factors << 1.0, 0.5;
  s.col_factors << 1.0, 1.0;
  s.lambda << 1.0, 1.0;
  EXPECT_NEAR(intensity(s, 0, 0), 1.5, 1e-15);
  EXPECT_NEAR(link_probability(s, 0, 0), 0.77686983985157, 1e-12);
}

TEST(Truncated, ZeroEntriesCarryNoCounts) {
  Rng r(2);
  const auto x = random_matrix(r, 6, 5, 0.3);
  auto s = init_state(x, 4, Hyperparameters::defaults(Variant::epm, 6, 5), Rng(3));
  for (int it = 0; it < 5; ++it) gibbs_sweep(s, x);
  ASSERT_EQ(s.counts.edges(), x.nnz());
  for (std::size_t e = 0; e < s.counts.edges(); ++e) {
    EXPECT_TRUE(x.at(s.counts.cell(e).row, s.counts.cell(e).col));
    EXPECT_GE(s.counts.edge_total(e), 1);
  }
}

TEST(Truncated, CountsRebuiltWhenEdgeSetChanges) {
  const BinaryMatrix x1(2, 2, {{0, 0}, {1, 1}});
  const BinaryMatrix x2(2, 2, {{0, 1}, {1, 0}});
  auto s = init_state(x1, 3, Hyperparameters::defaults(Variant::depm, 2, 2), Rng(4));
  sample_latent_counts(s, x2);
  EXPECT_EQ(s.counts.cell(0), (Cell{0, 1}));
  EXPECT_TRUE(s.counts.audit());
}

TEST(Truncated, DepmFactorsStayOnSimplex) {
  Rng r(5);
  const auto x = random_matrix(r, 8, 6, 0.35);
  auto s = init_state(x, 5, Hyperparameters::defaults(Variant::depm, 8, 6), Rng(6));
  for (int it = 0; it < 20; ++it) {
    gibbs_sweep(s, x);
    for (int k = 0; k < s.T; ++k) {
      ASSERT_NEAR(s.row_factors.col(k).sum(), 1.0, 1e-9);
      ASSERT_NEAR(s.col_factors.col(k).sum(), 1.0, 1e-9);
    }
  }
}

TEST(Truncated, CepmConstraintHoldsAfterSweeps) {
  Rng r(7);
  const auto x = random_matrix(r, 8, 8, 0.3);
  auto s = init_state(x, 4, Hyperparameters::defaults(Variant::cepm, 8, 8), Rng(8));
  for (int it = 0; it < 20; ++it) {
    gibbs_sweep(s, x);
    ASSERT_NEAR(s.hypers.b1, s.hypers.C1 * s.hypers.a1, 1e-12 * s.hypers.b1);
    ASSERT_NEAR(s.hypers.b2, s.hypers.C2 * s.hypers.a2, 1e-12 * s.hypers.b2);
  }
}

TEST(Truncated, CepmGridIsTheDocumentedLadder) {
  const auto& g = cepm_shape_grid();
  ASSERT_EQ(g.size(), 99u);
  EXPECT_NEAR(1.0 / (1.0 + g.front()), 0.01, 1e-12);
  EXPECT_NEAR(1.0 / (1.0 + g.back()), 0.99, 1e-12);
}

TEST(Truncated, CepmGridWeightsMatchIntegratedLikelihood) {
  Rng r(9);
  const auto x = random_matrix(r, 7, 6, 0.4);
  auto s = init_state(x, 3, Hyperparameters::defaults(Variant::cepm, 7, 6), Rng(10));
  for (int it = 0; it < 3; ++it) gibbs_sweep(s, x);
  const auto w = cepm_grid_log_weights(s, Side::rows);
  const auto& g = cepm_shape_grid();
  const double base = cepm_rows_reference(s, g[0]);
  for (std::size_t p = 1; p < g.size(); ++p) {
    const double expect = cepm_rows_reference(s, g[p]) - base;
    EXPECT_NEAR(w[p] - w[0], expect, 1e-7 * (1 + std::abs(expect))) << "grid point " << p;
  }
}

TEST(Truncated, CountsConserveAcrossVariants) {
  for (auto v : {Variant::epm, Variant::cepm, Variant::depm}) {
    Rng r(11);
    const auto x = random_matrix(r, 5, 5, 0.4);
    auto s = init_state(x, 3, Hyperparameters::defaults(v, 5, 5), Rng(12));
    for (int it = 0; it < 10; ++it) {
      gibbs_sweep(s, x);
      ASSERT_TRUE(s.counts.audit()) << to_string(v);
      count_t total = 0;
      for (int k = 0; k < s.T; ++k) total += s.counts.atom_total(k);
      ASSERT_EQ(total, s.counts.total());
    }
  }
}

TEST(Truncated, ActiveAtomsMatchCounts) {
  Rng r(13);
  const auto x = random_matrix(r, 6, 6, 0.3);
  auto s = init_state(x, 6, Hyperparameters::defaults(Variant::depm, 6, 6), Rng(14));
  gibbs_sweep(s, x);
  int active = 0;
  for (int k = 0; k < s.T; ++k) active += s.counts.atom_total(k) > 0;
  EXPECT_EQ(count_active_atoms(s), active);
}

TEST(Truncated, PriorDrawInitIsPositive) {
  Rng r(15);
  const auto x = random_matrix(r, 4, 4, 0.5);
  auto s = init_state(x, 3, Hyperparameters::defaults(Variant::epm, 4, 4), Rng(16), HyperInit::prior_draw);
  for (double v : {s.hypers.a1, s.hypers.b1, s.hypers.gamma0, s.hypers.c0}) EXPECT_GT(v, 0.0);
}

TEST(Truncated, SameSeedSameChain) {
  Rng r(17);
  const auto x = random_matrix(r, 6, 6, 0.3);
  auto a = init_state(x, 4, Hyperparameters::defaults(Variant::epm, 6, 6), Rng(18));
  auto b = init_state(x, 4, Hyperparameters::defaults(Variant::epm, 6, 6), Rng(18));
  for (int it = 0; it < 5; ++it) {
    gibbs_sweep(a, x);
    gibbs_sweep(b, x);
  }
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.hypers, b.hypers);
}

TEST(Truncated, LogLikelihoodFinite) {
  const auto x = make_synthetic_blocks(SyntheticSpec::parse("rows=12;cols=12;seed=2;block=0:6:0:6")).matrix;
  auto s = init_state(x, 8, Hyperparameters::defaults(Variant::depm, 12, 12), Rng(19));
  for (int it = 0; it < 30; ++it) gibbs_sweep(s, x);
  EXPECT_TRUE(std::isfinite(log_likelihood(s, x)));
  EXPECT_GE(count_active_atoms(s), 1);
}
