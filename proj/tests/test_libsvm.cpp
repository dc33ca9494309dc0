#include <gtest/gtest.h>

#include <sstream>

#include "amortized/libsvm.hpp"
#include "test_support.hpp"

using namespace amortized;

namespace {

LibsvmDataset parse(const std::string& text, std::optional<Eigen::Index> hint = {}) {
  std::istringstream in(text);
  return parse_libsvm(in, hint);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Libsvm, PlusOneWithGap) {
  const LibsvmDataset d = parse("+1 1:0.5 3:2.0\n");
  ASSERT_EQ(d.X.rows(), 1);
  ASSERT_EQ(d.X.cols(), 3);
  EXPECT_EQ(d.y[0], 1.0);
  EXPECT_EQ(d.X(0, 0), 0.5);
  EXPECT_EQ(d.X(0, 1), 0.0);
  EXPECT_EQ(d.X(0, 2), 2.0);
}

TEST(Libsvm, MinusOneWithDimensionHint) {
  const LibsvmDataset d = parse("-1 2:1", 4);
  ASSERT_EQ(d.X.cols(), 4);
  EXPECT_EQ(d.y[0], 0.0);
  EXPECT_EQ(d.X.row(0), Eigen::RowVector4d(0, 1, 0, 0));
}

TEST(Libsvm, ZeroOneLabelsKept) {
  const LibsvmDataset d = parse("0 1:1\n1 1:2\n0 2:3\n");
  EXPECT_EQ(d.y, Eigen::Vector3d(0, 1, 0));
}

TEST(Libsvm, CommentsBlankLinesAndWhitespace) {
  const LibsvmDataset d = parse("# header\n\n+1 1:1   2:2  # trailing\n   \n-1\t3:4 \r\n");
  ASSERT_EQ(d.X.rows(), 2);
  EXPECT_EQ(d.X.cols(), 3);
  EXPECT_EQ(d.X(1, 2), 4.0);
  EXPECT_EQ(d.y[1], 0.0);
}

TEST(Libsvm, LabelOnlyRow) {
  const LibsvmDataset d = parse("+1\n-1 2:1\n");
  EXPECT_EQ(d.X.row(0).norm(), 0.0);
}

TEST(Libsvm, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("+1 1:1\n+1 2:x\n"), 2u);
  EXPECT_EQ(error_line("+1 1:1\n\nabc 1:1\n"), 3u);
  EXPECT_EQ(error_line("+1 3:1 2:1\n"), 1u);
  EXPECT_EQ(error_line("+1 1:1\n-1 2:1 2:3\n"), 2u);
  EXPECT_EQ(error_line("+1 1:1 5\n"), 1u);
  EXPECT_EQ(error_line("+1 0:1\n"), 1u);
  EXPECT_EQ(error_line("+1 a:1\n"), 1u);
  EXPECT_EQ(error_line("+1 1:1e\n"), 1u);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("# only a comment\n\n"), ParseError);
}

TEST(Libsvm, MixedOrUnknownLabelsRejected) {
  EXPECT_THROW(parse("+1 1:1\n0 1:1\n-1 1:1\n"), ParseError);
  EXPECT_THROW(parse("2 1:1\n"), ParseError);
  EXPECT_THROW(parse("+1 1:1\n0.5 1:1\n"), ParseError);
}

TEST(Libsvm, HintSmallerThanIndexRejected) {
  EXPECT_THROW(parse("+1 5:1\n", 3), ParseError);
}

TEST(Libsvm, RoundTripRandomSparseData) {
  Rng rng(1);
  std::bernoulli_distribution keep(0.3), coin(0.5);
  std::normal_distribution<double> normal(0.0, 10.0);
  LibsvmDataset d{Eigen::MatrixXd::Zero(40, 12), Vector(40)};
  for (Eigen::Index i = 0; i < 40; ++i) {
    d.y[i] = coin(rng) ? 1.0 : 0.0;
    for (Eigen::Index j = 0; j < 12; ++j) {
      if (keep(rng)) d.X(i, j) = normal(rng);
    }
  }
  d.y[0] = 0.0;
  d.y[1] = 1.0;
  const LibsvmDataset back = parse(to_libsvm(d), 12);
  EXPECT_EQ(back.X, d.X);
  EXPECT_EQ(back.y, d.y);
}

TEST(Libsvm, MissingFileIsRuntimeError) {
  EXPECT_THROW(load_libsvm("/nonexistent/path.svm"), std::runtime_error);
}
