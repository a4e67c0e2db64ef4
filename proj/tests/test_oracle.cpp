#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "epm/oracle.hpp"

using namespace epm;

TEST(Oracle, MakeCheckUsesStandardErrors) {
  const auto ok = make_check("x", 1.0, 1.02, 0.01, 100);
  EXPECT_TRUE(ok.pass);
  EXPECT_NEAR(ok.z(), 2.0, 1e-12);
  EXPECT_FALSE(make_check("y", 1.0, 1.05, 0.01, 100).pass);
}

TEST(Oracle, EpmIntensityExpectation) {
  EpmPrior p;
  p.a1 = 2.0;
  p.b1 = 1.5;
  p.a2 = 0.7;
  p.b2 = 1.1;
  p.gamma0 = 0.9;
  p.c0 = 1.3;
  Rng rng(1);
  const auto c = mc_intensity_expectation_epm(p, 40000, rng);
  EXPECT_NEAR(c.analytic, (2.0 / 1.5) * (0.7 / 1.1) * (0.9 / 1.3), 1e-14);
  EXPECT_TRUE(c.pass) << c.z();
}

TEST(Oracle, DepmIntensityExpectation) {
  Rng rng(2);
  const auto c = mc_intensity_expectation_depm(4, 3, 1.2, 0.7, 40000, rng, 500, 0.8, 1.5);
  EXPECT_NEAR(c.analytic, 1.2 / (12 * 0.7), 1e-14);
  EXPECT_TRUE(c.pass) << c.z();
}

TEST(Oracle, PriorIntegrationSingleCustomer) {
  Rng rng(3);
  const auto c = verify_marginal_by_prior_mc({1, 1, {{{0, 0, 1}}}}, 1, IdepmHypers{}, 200000, rng);
  EXPECT_TRUE(c.pass) << c.z();
}

TEST(Oracle, PriorIntegrationTwoByTwo) {
  Rng rng(4);
  const CountTable t{2, 2, {{{0, 0, 2}, {1, 1, 1}}, {{0, 1, 1}}}};
  const auto c = verify_marginal_by_prior_mc(t, 2, IdepmHypers{}, 400000, rng);
  EXPECT_TRUE(c.pass) << c.z();
}

TEST(Oracle, PartitionLimitReport) {
  IdepmHypers h;
  h.gamma0 = 0.5;
  const auto r = verify_partition_limit({1, 2, {{{0, 0, 2}}, {{0, 1, 2}}}}, h);
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.ladder.size(), 5u);
  EXPECT_LT(r.final_error, 1e-6);
}

TEST(Oracle, GewekeDepmPassesShortRun) {
  GewekeOptions o;
  o.rounds = 20000;
  Rng rng(5);
  const auto r = geweke_joint_test("depm", o, rng);
  EXPECT_TRUE(r.pass) << r.max_abs_z;
  EXPECT_FALSE(r.stats.empty());
}

TEST(Oracle, GewekeIdepmPassesShortRun) {
  GewekeOptions o;
  o.rounds = 20000;
  Rng rng(6);
  const auto r = geweke_joint_test("idepm", o, rng);
  EXPECT_TRUE(r.pass) << r.max_abs_z;
}

TEST(Oracle, GewekeCorruptedUpdateFails) {
  GewekeOptions o;
  o.rounds = 20000;
  o.corrupt = true;
  Rng rng(7);
  const auto r = geweke_joint_test("epm", o, rng);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.max_abs_z, 4.0);
}

TEST(Oracle, GewekeRejectsGridModel) {
  Rng rng(8);
  EXPECT_THROW(geweke_joint_test("cepm", GewekeOptions{}, rng), std::invalid_argument);
}

TEST(Oracle, MomentSuiteShort) {
  Rng rng(9);
  for (const auto& c : moment_suite(100000, rng)) EXPECT_TRUE(c.pass) << c.name << " z=" << c.z();
}

TEST(Oracle, Writers) {
  std::ostringstream csv, txt;
  const std::vector<ExpectationCheck> checks{make_check("a", 1, 1, 0.1, 10)};
  write_checks_csv(csv, checks);
  write_checks_text(txt, checks);
  EXPECT_EQ(csv.str().substr(0, 32), "name,analytic,estimate,se,z,n,pa");
  EXPECT_EQ(txt.str().substr(0, 6), "PASS a");
}
