#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "epm/distributions.hpp"
#include "epm/rng.hpp"

using namespace epm;

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

template <class F>
Moments sample_moments(int n, F&& draw) {
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    s += x;
    ss += x * x;
  }
  const double m = s / n;
  return {m, std::sqrt((ss / n - m * m) / n)};
}

}  // namespace

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(Rng, SplitStreamsDiffer) {
  Rng root(42);
  Rng c1 = root.split(1), c2 = root.split(2), c1b = root.split(1);
  EXPECT_NE(c1.uniform(), c2.uniform());
  c1 = root.split(1);
  EXPECT_EQ(c1.uniform(), c1b.uniform());
}

TEST(Rng, UniformIsOpenInterval) {
  Rng r(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, SaveLoadResumesExactly) {
  Rng r(9);
  r.normal();  // leaves a cached normal behind
  std::stringstream ss;
  r.save(ss);
  Rng q;
  q.load(ss);
  EXPECT_TRUE(r == q);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(r.normal(), q.normal());
    EXPECT_EQ(r.gamma_unit(2.5), q.gamma_unit(2.5));
  }
}

TEST(Distributions, LogGammaValues) {
  EXPECT_NEAR(log_gamma_fn(0.5), 0.5723649429, 1e-10);
  EXPECT_NEAR(log_gamma_fn(11.0), 15.1044125731, 1e-10);
}

TEST(Distributions, GammaMeanShapeRate) {
  Rng r(1);
  const auto m = sample_moments(200000, [&] { return sample_gamma(r, 3.0, 2.0); });
  EXPECT_NEAR(m.mean, 1.5, 3 * m.se);
}

TEST(Distributions, TinyShapeGammaStaysPositive) {
  Rng r(2);
  for (int i = 0; i < 10000; ++i) {
    const double g = sample_gamma(r, 1e-4, 1.0);
    ASSERT_GT(g, 0.0);
    ASSERT_TRUE(std::isfinite(g));
  }
}

TEST(Distributions, LogGammaDrawSmallShapeMean) {
  // E[log G] for G ~ Gamma(a) is digamma(a); digamma(0.3) = -3.5025242222.
  Rng r(5);
  const auto m = sample_moments(200000, [&] { return sample_log_gamma(r, 0.3); });
  EXPECT_NEAR(m.mean, -3.5025242222, 3 * m.se);
}

TEST(Distributions, DirichletOnSimplex) {
  Rng r(4);
  const std::vector<double> a{0.01, 0.5, 2.0, 1e-3};
  for (int i = 0; i < 1000; ++i) {
    const auto p = sample_dirichlet(r, a);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (double v : p) EXPECT_GT(v, 0.0);
  }
}

TEST(Distributions, BetaMean) {
  Rng r(6);
  const auto m = sample_moments(200000, [&] { return sample_beta(r, 2.0, 5.0); });
  EXPECT_NEAR(m.mean, 2.0 / 7.0, 3 * m.se);
  const auto s = sample_moments(200000, [&] { return sample_beta(r, 0.3, 0.7); });
  EXPECT_NEAR(s.mean, 0.3, 3 * s.se);
}

TEST(Distributions, MultinomialConservesTotal) {
  Rng r(7);
  const std::vector<double> w{0.2, 0.0, 5.0, 1.3};
  for (count_t n : {0, 1, 7, 1000}) {
    const auto c = sample_multinomial(r, n, w);
    EXPECT_EQ(std::accumulate(c.begin(), c.end(), count_t{0}), n);
    EXPECT_EQ(c[1], 0);
  }
}

TEST(Distributions, ZtpNeverZero) {
  Rng r(8);
  for (double lam : {1e-8, 0.1, 9.99, 10.0, 300.0}) {
    for (int i = 0; i < 2000; ++i) ASSERT_GE(sample_ztp(r, lam), 1);
  }
}

TEST(Distributions, ZtpTinyRateIsOne) {
  Rng r(8);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_ztp(r, 1e-12), 1);
}

TEST(Distributions, ZtpMeanAtOne) {
  Rng r(10);
  const auto m = sample_moments(400000, [&] { return static_cast<double>(sample_ztp(r, 1.0)); });
  EXPECT_NEAR(m.mean, 1.5819767069, 3 * m.se);
}

TEST(Distributions, ZtpMeanAtTen) {
  Rng r(11);
  const auto m = sample_moments(400000, [&] { return static_cast<double>(sample_ztp(r, 10.0)); });
  EXPECT_NEAR(m.mean, 10.0004540199, 3 * m.se);
}

TEST(Distributions, AntoniakMean) {
  Rng r(12);
  const auto m = sample_moments(400000, [&] { return static_cast<double>(sample_antoniak(r, 3, 1.0)); });
  EXPECT_NEAR(m.mean, 11.0 / 6.0, 3 * m.se);
}

TEST(Distributions, AntoniakEdgeCases) {
  Rng r(13);
  EXPECT_EQ(sample_antoniak(r, 0, 1.0), 0);
  EXPECT_EQ(sample_antoniak(r, 1, 0.3), 1);
  for (int i = 0; i < 100; ++i) {
    const auto t = sample_antoniak(r, 20, 0.5);
    EXPECT_GE(t, 1);
    EXPECT_LE(t, 20);
  }
}

TEST(Distributions, PoissonMean) {
  Rng r(14);
  const auto m = sample_moments(200000, [&] { return static_cast<double>(sample_poisson(r, 4.2)); });
  EXPECT_NEAR(m.mean, 4.2, 3 * m.se);
}

TEST(Distributions, CategoricalFrequencies) {
  Rng r(15);
  const std::vector<double> w{1.0, 3.0, 0.0, 6.0};
  std::vector<int> hits(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++hits[sample_categorical(r, w, 10.0)];
  EXPECT_EQ(hits[2], 0);
  for (int k : {0, 1, 3}) {
    const double p = w[k] / 10.0;
    EXPECT_NEAR(hits[k] / double(n), p, 3 * std::sqrt(p * (1 - p) / n));
  }
}
