#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "epm/checkpoint.hpp"

using namespace epm;

namespace {

BinaryMatrix small_blocks() {
  return make_synthetic_blocks(SyntheticSpec::parse("rows=10;cols=9;seed=3;block=0:5:0:4;block=4:10:3:9")).matrix;
}

}  // namespace

TEST(Checkpoint, TruncatedRoundTripResumesBitForBit) {
  const auto x = small_blocks();
  for (auto v : {Variant::epm, Variant::cepm, Variant::depm}) {
    auto s = init_state(x, 5, Hyperparameters::defaults(v, x.rows(), x.cols()), Rng(11));
    for (int it = 0; it < 4; ++it) gibbs_sweep(s, x);
    std::stringstream ss;
    save_checkpoint(ss, s);
    auto t = load_truncated_checkpoint(ss);
    EXPECT_EQ(t.hypers, s.hypers);
    EXPECT_EQ(t.lambda, s.lambda);
    EXPECT_EQ(t.row_factors, s.row_factors);
    EXPECT_EQ(t.col_factors, s.col_factors);
    EXPECT_EQ(t.counts, s.counts);
    for (int it = 0; it < 3; ++it) {
      gibbs_sweep(s, x);
      gibbs_sweep(t, x);
    }
    EXPECT_EQ(t.lambda, s.lambda) << to_string(v);
    EXPECT_EQ(t.hypers, s.hypers) << to_string(v);
  }
}

TEST(Checkpoint, CollapsedRoundTripResumesBitForBit) {
  const auto x = small_blocks();
  auto s = init_collapsed(x, IdepmHypers{}, Rng(12));
  for (int it = 0; it < 4; ++it) collapsed_sweep(s, x);
  std::stringstream ss;
  save_checkpoint(ss, s);
  auto t = load_collapsed_checkpoint(ss);
  EXPECT_TRUE(audit(t));
  EXPECT_EQ(t.labels, s.labels);
  EXPECT_EQ(t.hypers, s.hypers);
  EXPECT_EQ(t.params.lambda, s.params.lambda);
  for (int it = 0; it < 3; ++it) {
    collapsed_sweep(s, x);
    collapsed_sweep(t, x);
  }
  EXPECT_EQ(t.labels, s.labels);
  EXPECT_EQ(t.hypers, s.hypers);
  EXPECT_EQ(t.next_id, s.next_id);
}

TEST(Checkpoint, KindAndWrongKind) {
  const auto x = small_blocks();
  auto s = init_collapsed(x, IdepmHypers{}, Rng(13));
  const auto path = (std::filesystem::temp_directory_path() / "epm_ckpt_test.txt").string();
  save_checkpoint_file(path, s);
  EXPECT_EQ(checkpoint_kind(path), "collapsed");
  std::stringstream ss;
  save_checkpoint(ss, s);
  EXPECT_THROW(load_truncated_checkpoint(ss), std::runtime_error);
  std::remove(path.c_str());
}

TEST(Checkpoint, TruncatedInputRejected) {
  std::stringstream ss("epm-checkpoint 1 truncated\nvariant depm\nshape 2 2");
  EXPECT_THROW(load_truncated_checkpoint(ss), std::runtime_error);
  std::stringstream bad_version("epm-checkpoint 7 truncated\n");
  EXPECT_THROW(load_truncated_checkpoint(bad_version), std::runtime_error);
}
