#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "epm/data.hpp"
#include "json.hpp"

using namespace epm;

TEST(BinaryMatrix, SortsAndDeduplicates) {
  BinaryMatrix m(3, 3, {{2, 1}, {0, 2}, {2, 1}, {0, 0}});
  EXPECT_EQ(m.nnz(), 3u);
  EXPECT_EQ(m.ones().front(), (Cell{0, 0}));
  EXPECT_TRUE(m.at(2, 1));
  EXPECT_FALSE(m.at(1, 1));
  EXPECT_EQ(m.edge_index(0, 2), 1);
  EXPECT_EQ(m.edge_index(1, 0), -1);
  EXPECT_NEAR(m.density(), 3.0 / 9.0, 1e-15);
}

TEST(BinaryMatrix, RejectsOutOfRange) {
  EXPECT_THROW(BinaryMatrix(2, 2, {{2, 0}}), std::out_of_range);
}

TEST(EdgeList, HeaderAndRoundTrip) {
  std::istringstream in("# 4 5\n0 1\n3 4\n\n1 1\n");
  const auto m = load_edge_list(in);
  EXPECT_EQ(m.rows(), 4);
  EXPECT_EQ(m.cols(), 5);
  EXPECT_EQ(m.nnz(), 3u);
  std::stringstream out;
  save_edge_list(out, m);
  EXPECT_EQ(load_edge_list(out), m);
}

TEST(EdgeList, ShapeInferredWithoutHeader) {
  std::istringstream in("0 1\n2 0\n");
  const auto m = load_edge_list(in);
  EXPECT_EQ(m.rows(), 3);
  EXPECT_EQ(m.cols(), 2);
}

TEST(EdgeList, DuplicatesCountedWithWarning) {
  std::istringstream in("# 2 2\n0 1\n0 1\n");
  LoadStats st;
  const auto m = load_edge_list(in, &st);
  EXPECT_EQ(m.nnz(), 1u);
  EXPECT_EQ(st.duplicates, 1u);
  EXPECT_FALSE(st.warnings.empty());
}

TEST(EdgeList, MalformedLineThrows) {
  std::istringstream in("# 2 2\n0 x\n");
  EXPECT_ANY_THROW(load_edge_list(in));
  std::istringstream out_of_range("# 2 2\n0 5\n");
  EXPECT_THROW(load_edge_list(out_of_range), std::out_of_range);
}

TEST(Ratings, ThresholdBinarizes) {
  std::istringstream in("0 0 5\n0 1 3\n1 2 4.5\n2 0 1\n");
  const auto m = load_ratings(in, 3.0);
  EXPECT_EQ(m.rows(), 3);
  EXPECT_EQ(m.cols(), 3);
  EXPECT_EQ(m.nnz(), 2u);
  EXPECT_TRUE(m.at(0, 0));
  EXPECT_FALSE(m.at(0, 1));
  EXPECT_TRUE(m.at(1, 2));
}

TEST(Synthetic, StandardLayout) {
  const auto d = make_synthetic_blocks(SyntheticSpec::standard());
  EXPECT_EQ(d.matrix.rows(), 90);
  EXPECT_EQ(d.matrix.cols(), 90);
  EXPECT_EQ(d.spec.blocks.size(), 5u);
  // Noise-free: ones are exactly the union of the blocks.
  EXPECT_EQ(d.matrix.nnz(), d.covered_cells);
  EXPECT_EQ(d.matrix.nnz(), 4150u);
}

TEST(Synthetic, SpecRoundTrip) {
  const auto spec = SyntheticSpec::parse("rows=10;cols=12;noise=0.05;seed=3;block=0:5:0:6;block=4:10:3:12:0.8");
  EXPECT_EQ(spec.blocks.size(), 2u);
  EXPECT_DOUBLE_EQ(spec.blocks[1].on_prob, 0.8);
  const auto again = SyntheticSpec::parse(spec.to_string());
  EXPECT_EQ(again.to_string(), spec.to_string());
  EXPECT_EQ(again.blocks, spec.blocks);
}

TEST(Synthetic, InvalidSpecThrows) {
  EXPECT_THROW(SyntheticSpec::parse("rows=10;cols=10;block=0:11:0:5"), std::invalid_argument);
  EXPECT_THROW(SyntheticSpec::parse("rows=10;colz=10"), std::invalid_argument);
}

TEST(Synthetic, NoBlocksNoOnes) {
  const auto d = make_synthetic_blocks(SyntheticSpec::parse("rows=6;cols=7;noise=0"));
  EXPECT_EQ(d.matrix.nnz(), 0u);
  std::stringstream out;
  save_edge_list(out, d.matrix);
  EXPECT_EQ(out.str(), "# 6 7\n");
}

TEST(Synthetic, SameSeedSameMatrix) {
  const auto spec = SyntheticSpec::parse("rows=20;cols=20;noise=0.1;seed=7;block=0:10:0:10:0.7");
  EXPECT_EQ(make_synthetic_blocks(spec).matrix, make_synthetic_blocks(spec).matrix);
}

TEST(Synthetic, MetadataDensity) {
  const auto d = make_synthetic_blocks(SyntheticSpec::standard());
  const auto meta = nlohmann::json::parse(synthetic_metadata_json(d));
  EXPECT_NEAR(meta["density"].get<double>(), 4150.0 / 8100.0, 1e-12);
  EXPECT_EQ(meta["ones"].get<int>(), 4150);
}

TEST(Folds, PartitionAllCells) {
  const auto d = make_synthetic_blocks(SyntheticSpec::standard());
  Rng rng(5);
  const auto folds = make_cv_folds(d.matrix, 10, rng);
  ASSERT_EQ(folds.size(), 10u);
  std::set<std::pair<int, int>> seen;
  std::size_t test_ones = 0;
  for (const auto& f : folds) {
    EXPECT_EQ(f.test.size(), 810u);
    for (const auto& e : f.test) {
      EXPECT_TRUE(seen.emplace(e.row, e.col).second);
      EXPECT_EQ(e.value, d.matrix.at(e.row, e.col) ? 1 : 0);
      test_ones += e.value;
      EXPECT_FALSE(f.train.at(e.row, e.col));
    }
    std::size_t fold_ones = 0;
    for (const auto& e : f.test) fold_ones += e.value;
    EXPECT_EQ(f.train.nnz() + fold_ones, d.matrix.nnz());
  }
  EXPECT_EQ(seen.size(), 8100u);
  EXPECT_EQ(test_ones, d.matrix.nnz());
}

TEST(Folds, TooFewFoldsThrows) {
  Rng rng(1);
  EXPECT_THROW(make_cv_folds(BinaryMatrix(3, 3), 1, rng), std::invalid_argument);
}
