#pragma once

#include <string>

namespace recmix {

// Amplification factor of the limiting error, (w^2 + (1-w)^2 k) / (2w - w^2).
double c_factor(double w, double k);

// Minimizer of c_factor(., k): (sqrt(k^2 + 4k) - k) / 2.
double optimal_weight(double k);

// Weight implied by pooling real and synthetic samples unweighted: k / (k + 1).
double naive_weight(double k);

double gaussian_mean_limit(double w, double k, int n, double tr_sigma);

struct CovLimit {
  double value = 0.0;           // +inf when divergent
  bool near_threshold = false;  // denominator cancelled to ~0
};

// Limiting E||Sigma_t - Sigma||_F^2 for finite n, m. +inf at or below the
// divergence threshold 1 - sqrt((m-1)/(m+1)).
CovLimit gaussian_cov_limit(double w, int n, int m, double tr_sigma, double tr_sigma_sq);
double gaussian_cov_limit_finite(double w, int n, int m, double tr_sigma, double tr_sigma_sq);
double gaussian_cov_threshold(int m);

// Scaled GLM error after t recursive steps, starting from tr_sigma0_inv at t = 0.
double glm_scaled_error(double w, double k, int t, double tr_sigma0_inv);
double glm_limit_error(double w, double k, double tr_sigma0_inv);

// Operator-norm bound factor after T steps; tends to c_factor(w, k).
double cov_opnorm_beta(double w, double k, int T);

double cdf_limit_error(double w, int n, int m);
// Exact minimizer of cdf_limit_error(., n, m) over (0, 1].
double cdf_optimal_weight(int n, int m);
// Largest w for which mixing does not improve on real data alone.
double cdf_no_improvement_threshold(int n, int m);

enum class Regime { kCollapse, kNoImprovement, kImprovement };
enum class RegimeSetting { kGaussianCov, kCdf };

std::string to_string(Regime r);

// For gaussian_cov the comparison uses the finite-sample limits at w and at
// w = 1 for the supplied traces (defaults: p = 1, Sigma = 1).
Regime classify_regime(RegimeSetting setting, double w, int n, int m, double tr_sigma = 1.0,
                       double tr_sigma_sq = 1.0);

}  // namespace recmix
