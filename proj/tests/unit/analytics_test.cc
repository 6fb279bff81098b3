#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "recmix/analytics.h"
#include "recmix/errors.h"

namespace recmix {
namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

std::vector<double> log_spaced_k(int count) {
  std::vector<double> ks;
  for (int i = 0; i < count; ++i) ks.push_back(std::pow(10.0, -2.0 + 4.0 * i / (count - 1)));
  return ks;
}

template <typename F>
double grid_argmin(F f, double lo, double hi, double step) {
  double best_w = lo;
  double best = f(lo);
  const auto count = static_cast<long>(std::floor((hi - lo) / step));
  for (long i = 1; i <= count; ++i) {
    const double w = lo + step * i;
    const double v = f(w);
    if (v < best) {
      best = v;
      best_w = w;
    }
  }
  return best_w;
}

TEST(CFactor, Examples) {
  for (double k : {0.1, 1.0, 7.0}) EXPECT_DOUBLE_EQ(c_factor(1.0, k), 1.0);
  EXPECT_NEAR(c_factor(optimal_weight(1.0), 1.0), 0.6180339887498949, 1e-15);
  EXPECT_NEAR(c_factor(0.5, 1.0), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(c_factor(0.0, 1.0), Error);
  EXPECT_THROW(c_factor(1.1, 1.0), Error);
  EXPECT_THROW(c_factor(0.5, 0.0), Error);
}

TEST(OptimalWeight, Examples) {
  EXPECT_NEAR(optimal_weight(1.0), 0.6180339887, 1e-10);
  EXPECT_GT(optimal_weight(1e6), 0.999);
  EXPECT_NEAR(optimal_weight(0.01), 0.0951, 1e-4);
  // Independent high-precision ternary search.
  EXPECT_NEAR(optimal_weight(0.01), 0.09512492197250393, 1e-15);
  EXPECT_NEAR(optimal_weight(2.0), 0.73205080756887729, 1e-15);
  EXPECT_NEAR(optimal_weight(10.0), 0.91607978309961604, 1e-15);
  EXPECT_THROW(optimal_weight(-1.0), Error);
}

TEST(OptimalWeight, FixedPointOfCFactor) {
  for (double k : log_spaced_k(50)) {
    const double ws = optimal_weight(k);
    EXPECT_NEAR(c_factor(ws, k), ws, 1e-12) << "k=" << k;
  }
}

TEST(OptimalWeight, MatchesGridArgmin) {
  for (double k : log_spaced_k(50)) {
    const double grid = grid_argmin([k](double w) { return c_factor(w, k); }, 1e-5, 1.0, 1e-5);
    EXPECT_NEAR(optimal_weight(k), grid, 2e-5) << "k=" << k;
  }
}

TEST(NaiveWeight, Examples) {
  EXPECT_DOUBLE_EQ(naive_weight(1.0), 0.5);
  EXPECT_DOUBLE_EQ(naive_weight(3.0), 0.75);
  for (double k = 0.1; k <= 10.0; k += 0.1) EXPECT_LT(naive_weight(k), optimal_weight(k));
  for (double k : log_spaced_k(50)) {
    EXPECT_NE(naive_weight(k), optimal_weight(k));
    EXPECT_GT(glm_limit_error(naive_weight(k), k, 1.0), glm_limit_error(optimal_weight(k), k, 1.0));
  }
}

TEST(GaussianMeanLimit, Examples) {
  EXPECT_DOUBLE_EQ(gaussian_mean_limit(1.0, 3.0, 50, 4.0), 4.0 / 50.0);
  EXPECT_NEAR(gaussian_mean_limit(optimal_weight(1.0), 1.0, 100, 1.0), 0.006180339887498949, 1e-17);
  EXPECT_GT(gaussian_mean_limit(1e-9, 1.0, 100, 1.0), 1e6 / 100.0);
}

TEST(GaussianCovLimit, RealOnlyValue) {
  EXPECT_NEAR(gaussian_cov_limit_finite(1.0, 100, 100, 4.0, 4.0), 20.0 / 99.0, 1e-15);
  EXPECT_NEAR(gaussian_cov_limit_finite(1.0, 11, 3, 2.0, 3.0), 7.0 / 10.0, 1e-15);
}

TEST(GaussianCovLimit, InfiniteAtAndBelowThreshold) {
  for (int m : {2, 10, 100}) {
    const double thr = gaussian_cov_threshold(m);
    EXPECT_TRUE(std::isinf(gaussian_cov_limit_finite(thr, 100, m, 1.0, 1.0)));
    EXPECT_TRUE(std::isinf(gaussian_cov_limit_finite(thr * 0.5, 100, m, 1.0, 1.0)));
    EXPECT_TRUE(std::isfinite(gaussian_cov_limit_finite(thr * 1.01, 100, m, 1.0, 1.0)));
  }
  EXPECT_NEAR(gaussian_cov_threshold(10), 1.0 - std::sqrt(9.0 / 11.0), 1e-16);
}

TEST(GaussianCovLimit, MatchesMomentRecursionFixedPoint) {
  // Fixed points of the (E tr^2, E tr(Sigma_t^2)) linear recursion, solved in
  // 40-digit arithmetic.
  struct Case {
    double w;
    int n, m;
    double tr, tr2, expected;
  };
  const Case cases[] = {
      {0.618, 100, 100, 1, 1, 0.012528779987713513},
      {0.3, 100, 10, 1, 1, 0.27600100730294638},
      {0.5, 50, 20, 4, 4, 0.49941782355575459},
      {0.9, 10, 5, 3, 5, 1.3137746295183419},
      {0.618, 1000, 1000, 1, 1, 0.0012377286599517215},
  };
  for (const auto& c : cases) {
    EXPECT_NEAR(gaussian_cov_limit_finite(c.w, c.n, c.m, c.tr, c.tr2) / c.expected, 1.0, 1e-12)
        << "w=" << c.w << " n=" << c.n << " m=" << c.m;
  }
}

TEST(GaussianCovLimit, LargeSampleScaling) {
  const double v = gaussian_cov_limit_finite(0.618, 1000, 1000, 1.0, 1.0);
  EXPECT_NEAR(v / (c_factor(0.618, 1.0) * 2.0 / 1000.0), 1.0, 0.02);
}

TEST(GlmScaledError, Examples) {
  EXPECT_DOUBLE_EQ(glm_scaled_error(0.3, 2.0, 0, 5.0), 5.0);
  const double ws = optimal_weight(1.0);
  EXPECT_NEAR(glm_scaled_error(ws, 1.0, 1, 1.0), ws + std::pow(1 - ws, 3), 1e-15);
  EXPECT_NEAR(glm_scaled_error(ws, 1.0, 1, 1.0), 0.6737, 1e-4);
  EXPECT_NEAR(glm_scaled_error(0.5, 1.0, 1, 1.0), 0.75, 1e-15);
  EXPECT_THROW(glm_scaled_error(0.5, 1.0, -1, 1.0), Error);
}

TEST(GlmScaledError, ClosedFormsAtOptimalAndNaiveWeights) {
  for (double k : {0.1, 0.5, 1.0, 2.0, 9.0}) {
    const double ws = optimal_weight(k);
    const double w0 = naive_weight(k);
    for (int t = 0; t <= 30; ++t) {
      EXPECT_NEAR(glm_scaled_error(ws, k, t, 1.0), ws + std::pow(1 - ws, 2 * t + 1), 1e-12);
      EXPECT_NEAR(glm_scaled_error(w0, k, t, 1.0),
                  (k + 1) / (k + 2) + std::pow(1 / (k + 1), 2 * t) / (k + 2), 1e-12);
    }
  }
}

TEST(GlmScaledError, MonotoneAfterFirstStep) {
  for (double w : {0.05, 0.3, 0.618, 0.9}) {
    for (double k : {0.2, 1.0, 4.0}) {
      const double limit = glm_limit_error(w, k, 1.0);
      double prev_gap = std::abs(glm_scaled_error(w, k, 1, 1.0) - limit);
      for (int t = 2; t <= 60; ++t) {
        const double gap = std::abs(glm_scaled_error(w, k, t, 1.0) - limit);
        EXPECT_LE(gap, prev_gap + 1e-15);
        prev_gap = gap;
      }
    }
  }
}

TEST(GlmLimitError, Examples) {
  EXPECT_DOUBLE_EQ(glm_limit_error(1.0, 3.0, 7.0), 7.0);
  EXPECT_NEAR(glm_limit_error(0.7, 1.0, 1.0), glm_scaled_error(0.7, 1.0, 1000000, 1.0), 1e-9);
  for (double k : {0.5, 1.0, 2.0}) {
    const double grid = grid_argmin([k](double w) { return glm_limit_error(w, k, 1.0); }, 1e-4, 1.0, 1e-4);
    EXPECT_NEAR(grid, optimal_weight(k), 1e-4);
  }
}

TEST(CovOpnormBeta, Examples) {
  EXPECT_NEAR(cov_opnorm_beta(0.4, 1.5, 1000000), c_factor(0.4, 1.5), 1e-9);
  EXPECT_DOUBLE_EQ(cov_opnorm_beta(0.4, 1.5, 0), 1.0);
  for (int t : {0, 1, 10, 100}) EXPECT_DOUBLE_EQ(cov_opnorm_beta(1.0, 2.0, t), 1.0);
}

TEST(CdfLimitError, Examples) {
  EXPECT_NEAR(cdf_limit_error(1.0, 40, 7), 1.0 / 240.0, 1e-17);
  EXPECT_NEAR(cdf_limit_error(1e-9, 100, 100), 1.0 / 6.0, 1e-6);
  EXPECT_NEAR(cdf_limit_error(0.3, 100, 50), 0.0034308067205335387, 1e-16);
}

TEST(CdfOptimalWeight, MatchesGridAndTernarySearch) {
  const double grid =
      grid_argmin([](double w) { return cdf_limit_error(w, 100, 100); }, 1e-4, 1.0, 1e-4);
  EXPECT_NEAR(cdf_optimal_weight(100, 100), grid, 1e-3);
  EXPECT_NEAR(cdf_optimal_weight(100, 100), 0.61697664942697509, 1e-14);
  EXPECT_NEAR(cdf_optimal_weight(100, 10), 0.91542541390318463, 1e-14);
  EXPECT_NEAR(cdf_optimal_weight(50, 500), 0.26954064378375283, 1e-14);
  EXPECT_NEAR(cdf_optimal_weight(10, 1000), 0.094695894688709153, 1e-14);
}

TEST(CdfOptimalWeight, GoldenLimitAndMonotoneInM) {
  EXPECT_NEAR(cdf_optimal_weight(1000000, 1000000), kGolden, 1e-3);
  double prev = cdf_optimal_weight(100, 10);
  for (int m = 11; m <= 10000; m += (m < 100 ? 1 : 37)) {
    const double w = cdf_optimal_weight(100, m);
    EXPECT_LT(w, prev) << "m=" << m;
    EXPECT_GT(w, 0.0);
    prev = w;
  }
}

TEST(ClassifyRegime, CdfStages) {
  const int n = 100;
  const int m = 50;
  const double thr = cdf_no_improvement_threshold(n, m);
  EXPECT_EQ(classify_regime(RegimeSetting::kCdf, thr, n, m), Regime::kNoImprovement);
  EXPECT_EQ(classify_regime(RegimeSetting::kCdf, thr + 1e-9, n, m), Regime::kImprovement);
  EXPECT_EQ(classify_regime(RegimeSetting::kCdf, 0.1, 100, 1000000), Regime::kImprovement);
  // Boundary: limit at the threshold equals the real-only limit.
  EXPECT_NEAR(cdf_limit_error(thr, n, m), cdf_limit_error(1.0, n, m), 1e-15);
}

TEST(ClassifyRegime, GaussianCovStages) {
  EXPECT_EQ(classify_regime(RegimeSetting::kGaussianCov, 1.0, 100, 100), Regime::kNoImprovement);
  EXPECT_EQ(classify_regime(RegimeSetting::kGaussianCov, 0.05, 100, 10), Regime::kCollapse);
  EXPECT_EQ(classify_regime(RegimeSetting::kGaussianCov, 0.618, 100, 100), Regime::kImprovement);
  EXPECT_EQ(classify_regime(RegimeSetting::kGaussianCov, 0.12, 100, 10), Regime::kNoImprovement);
  EXPECT_THROW(classify_regime(RegimeSetting::kCdf, 0.0, 100, 10), Error);
  EXPECT_EQ(to_string(Regime::kCollapse), "collapse");
}

}  // namespace
}  // namespace recmix
