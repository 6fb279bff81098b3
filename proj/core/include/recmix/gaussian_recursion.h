#pragma once

#include <functional>
#include <vector>

#include "recmix/linalg_stats.h"
#include "recmix/mix_config.h"
#include "recmix/rng.h"

namespace recmix {

struct GaussianModel {
  Vec mu;
  Mat sigma;
};

struct GaussianStep {
  double mean_err = 0.0;  // ||mu_t - mu||_2^2
  double cov_err = 0.0;   // ||Sigma_t - Sigma||_F^2
  bool clamped = false;   // Sigma_{t-1} needed eigenvalue clamping before sampling
};

// Steps 0..T. Non-finite errors are stored as +inf and the chain stops
// sampling; every later step repeats +inf.
struct GaussianTrajectory {
  std::vector<GaussianStep> steps;

  std::vector<double> mean_errors() const;
  std::vector<double> cov_errors() const;
};

// Called with (t, mu_t, Sigma_t) after each step, including t = 0.
using GaussianObserver = std::function<void(int, const Vec&, const Mat&)>;

Vec weighted_mean_update(const SampleMatrix& real_xs, const SampleMatrix& synth_xs, double w);
Mat weighted_cov_update(const Mat& s_hat, const Mat& s_tilde, double w);

// Step 0 fits (mu_0, Sigma_0) to n real draws. Each later step draws m
// synthetic points from N(mu_{t-1}, Sigma_{t-1}) and n fresh real points from
// `truth`, then takes the w-weighted mean and covariance.
GaussianTrajectory run_gaussian_chain(const GaussianModel& truth, const MixConfig& cfg,
                                      int steps, RngStream& rng,
                                      const GaussianObserver& observer = {});

// Mean estimator with one weight per sample:
//   (1/n) sum_i real_w[i] x_i + (1/m) sum_j synth_w[j] x~_j.
// Weights must satisfy sum(real_w)/n + sum(synth_w)/m == 1.
struct PerSampleWeights {
  std::vector<double> real;
  std::vector<double> synth;
};

Vec per_sample_weighted_mean(const SampleMatrix& real_xs, const SampleMatrix& synth_xs,
                             const PerSampleWeights& weights);

// Mean-only recursion with per-sample weights. Synthetic draws come from
// N(mu_{t-1}, truth.sigma); returns ||mu_t - mu||^2 for t = 0..T.
std::vector<double> run_per_sample_mean_chain(const GaussianModel& truth,
                                              const PerSampleWeights& weights, int steps,
                                              RngStream& rng);

}  // namespace recmix
