#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "recmix/errors.h"
#include "recmix/linalg_stats.h"
#include "recmix/rng.h"

namespace recmix {
namespace {

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no recmix::Error thrown";
  return ErrorCode::kConfigError;
}

TEST(Cholesky, IdentityStaysIdentity) {
  EXPECT_TRUE(cholesky(Mat::Identity(2, 2)).isApprox(Mat::Identity(2, 2)));
}

TEST(Cholesky, KnownFactor) {
  const Mat l = cholesky(mat2(4, 2, 2, 5));
  EXPECT_TRUE(l.isApprox(mat2(2, 0, 1, 2), 1e-15));
}

TEST(Cholesky, IndefiniteThrowsNotPsd) {
  EXPECT_EQ(code_of([] { cholesky(mat2(1, 2, 2, 1)); }), ErrorCode::kNotPsd);
  EXPECT_EQ(code_of([] { cholesky(mat2(0, 1, 1, 1)); }), ErrorCode::kNotPsd);
}

TEST(Cholesky, SemidefiniteAccepted) {
  const Mat a = mat2(1, 1, 1, 1);
  const Mat l = cholesky(a);
  EXPECT_LT((l * l.transpose() - a).norm(), 1e-12);
  EXPECT_TRUE(cholesky(Mat::Zero(3, 3)).isZero());
}

TEST(Cholesky, RandomPsdReconstructs) {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 1 + trial % 8;
    Mat b(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) b(i, j) = rng.normal();
    // Rank-deficient half the time.
    if (trial % 2 == 1 && p > 1) b.col(0).setZero();
    const Mat a = b * b.transpose();
    const Mat l = cholesky(a);
    EXPECT_LT((l * l.transpose() - a).norm() / a.norm(), 1e-9) << "trial " << trial;
  }
}

TEST(ClampToPsd, RemovesNegativeEigenvalues) {
  const Mat c = clamp_to_psd(mat2(1, 2, 2, 1));
  EXPECT_TRUE(is_psd(c));
  EXPECT_TRUE(c.isApprox(mat2(1.5, 1.5, 1.5, 1.5), 1e-12));
  EXPECT_FALSE(is_psd(mat2(1, 2, 2, 1)));
}

TEST(SampleMvn, ZeroFactorGivesMean) {
  RngStream rng(1, 0);
  const SampleMatrix xs = sample_mvn(Vec::Zero(2), Mat::Zero(2, 2), 3, rng);
  EXPECT_EQ(xs.rows(), 3);
  EXPECT_TRUE(xs.isZero());
}

TEST(SampleMvn, MeanWithinCltBound) {
  RngStream rng(2, 0);
  Vec mean(1);
  mean << 5.0;
  const SampleMatrix xs = sample_mvn(mean, Mat::Identity(1, 1), 100000, rng);
  EXPECT_NEAR(xs.col(0).mean(), 5.0, 3.0 * 5.0 / std::sqrt(1e5));
}

TEST(SampleMvn, DeterministicForFixedStream) {
  RngStream a(3, 9);
  RngStream b(3, 9);
  const Mat l = cholesky(mat2(2, 0.5, 0.5, 1));
  EXPECT_EQ(sample_mvn(Vec::Ones(2), l, 50, a), sample_mvn(Vec::Ones(2), l, 50, b));
}

TEST(SampleMvn, DimensionMismatchThrows) {
  RngStream rng(1, 0);
  EXPECT_EQ(code_of([&] { sample_mvn(Vec::Zero(3), Mat::Identity(2, 2), 1, rng); }),
            ErrorCode::kDimensionMismatch);
}

TEST(RngStream, BitwiseReproducibleAndStreamsDiffer) {
  RngStream a(42, 7);
  RngStream b(42, 7);
  RngStream c(42, 8);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    differs |= x != c.normal();
  }
  EXPECT_TRUE(differs);
  EXPECT_NE(RngStream::replication_stream(0), RngStream::replication_stream(1));
}

TEST(RngStream, UniformInUnitInterval) {
  RngStream rng(5, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(SampleMean, Examples) {
  EXPECT_TRUE(sample_mean(mat2(1, 1, 3, 3)).isApprox(Vec::Constant(2, 2.0)));
  SampleMatrix one(1, 2);
  one << 4, -1;
  EXPECT_EQ(sample_mean(one), one.row(0).transpose());
  SampleMatrix col(3, 1);
  col << 0, 0, 3;
  EXPECT_DOUBLE_EQ(sample_mean(col)(0), 1.0);
  EXPECT_EQ(code_of([] { sample_mean(SampleMatrix(0, 2)); }), ErrorCode::kEmptySample);
}

TEST(SampleCov, Examples) {
  SampleMatrix xs(2, 1);
  xs << 0, 2;
  EXPECT_DOUBLE_EQ(sample_cov(xs, sample_mean(xs))(0, 0), 2.0);
  const SampleMatrix same = SampleMatrix::Constant(5, 3, 1.5);
  EXPECT_TRUE(sample_cov(same, sample_mean(same)).isZero());
  EXPECT_EQ(code_of([] { sample_cov(SampleMatrix::Zero(1, 2), Vec::Zero(2)); }),
            ErrorCode::kTooFewSamples);
}

TEST(SampleCov, LargeSampleNearIdentityAndSymmetric) {
  RngStream rng(6, 0);
  const SampleMatrix xs = sample_mvn(Vec::Zero(3), Mat::Identity(3, 3), 100000, rng);
  const Mat s = sample_cov(xs, sample_mean(xs));
  EXPECT_EQ(s, s.transpose());
  EXPECT_TRUE(is_psd(s));
  EXPECT_LT((s - Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(SampleCov, UnbiasedAtSmallN) {
  const Mat sigma = mat2(2.0, 0.6, 0.6, 1.0);
  const Mat l = cholesky(sigma);
  RngStream rng(7, 0);
  const int reps = 10000;
  Mat sum = Mat::Zero(2, 2);
  Mat sum_sq = Mat::Zero(2, 2);
  for (int r = 0; r < reps; ++r) {
    const SampleMatrix xs = sample_mvn(Vec::Zero(2), l, 5, rng);
    const Mat s = sample_cov(xs, sample_mean(xs));
    sum += s;
    sum_sq += s.cwiseProduct(s);
  }
  const Mat mean = sum / reps;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double var = sum_sq(i, j) / reps - mean(i, j) * mean(i, j);
      EXPECT_NEAR(mean(i, j), sigma(i, j), 3.0 * std::sqrt(var / reps)) << i << "," << j;
    }
  }
}

TEST(TraceHelpers, Examples) {
  EXPECT_DOUBLE_EQ(trace(Mat::Identity(4, 4)), 4.0);
  EXPECT_DOUBLE_EQ(trace_of_square(mat2(1, 2, 2, 1)), 10.0);
  const Mat a = mat2(1, 2, 3, 4);
  EXPECT_DOUBLE_EQ(frob_sq_dist(a, a), 0.0);
  EXPECT_DOUBLE_EQ(frob_sq_dist(a, Mat::Zero(2, 2)), 30.0);
  EXPECT_DOUBLE_EQ(l2_sq_dist(Vec::Ones(3), Vec::Zero(3)), 3.0);
  EXPECT_EQ(code_of([] { l2_sq_dist(Vec::Ones(3), Vec::Zero(2)); }),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(code_of([] { frob_sq_dist(Mat::Ones(3, 3), Mat::Zero(2, 2)); }),
            ErrorCode::kDimensionMismatch);
}

}  // namespace
}  // namespace recmix
