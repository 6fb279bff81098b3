#include "recmix/gaussian_recursion.h"

#include <cmath>
#include <limits>
#include <string>

#include "recmix/errors.h"

namespace recmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double x) { return std::isfinite(x) ? x : kInf; }

// Cholesky of a covariance iterate, clamping negative eigenvalues when the
// plain factorization fails.
Mat sampling_factor(const Mat& sigma, bool& clamped) {
  clamped = false;
  try {
    return cholesky(sigma);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotPsd) throw;
  }
  clamped = true;
  return cholesky(clamp_to_psd(sigma));
}

}  // namespace

void MixConfig::validate() const {
  if (!(w >= 0.0 && w <= 1.0)) {
    fail(ErrorCode::kDomainError, "weight w must lie in [0, 1], got " + std::to_string(w));
  }
  if (n < 2 || m < 2) {
    fail(ErrorCode::kDomainError, "sample counts n and m must be >= 2");
  }
}

std::vector<double> GaussianTrajectory::mean_errors() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.mean_err);
  return out;
}

std::vector<double> GaussianTrajectory::cov_errors() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.cov_err);
  return out;
}

Vec weighted_mean_update(const SampleMatrix& real_xs, const SampleMatrix& synth_xs, double w) {
  if (real_xs.cols() != synth_xs.cols()) {
    fail(ErrorCode::kDimensionMismatch, "weighted_mean_update: dimension mismatch");
  }
  return w * sample_mean(real_xs) + (1.0 - w) * sample_mean(synth_xs);
}

Mat weighted_cov_update(const Mat& s_hat, const Mat& s_tilde, double w) {
  if (s_hat.rows() != s_tilde.rows() || s_hat.cols() != s_tilde.cols() ||
      s_hat.rows() != s_hat.cols()) {
    fail(ErrorCode::kDimensionMismatch, "weighted_cov_update: shape mismatch");
  }
  Mat out = w * s_hat + (1.0 - w) * s_tilde;
  out = 0.5 * (out + out.transpose());
  return out;
}

GaussianTrajectory run_gaussian_chain(const GaussianModel& truth, const MixConfig& cfg, int steps,
                                      RngStream& rng, const GaussianObserver& observer) {
  cfg.validate();
  if (steps < 1) fail(ErrorCode::kDomainError, "run_gaussian_chain: steps must be >= 1");
  const Mat truth_chol = cholesky(truth.sigma);

  GaussianTrajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(steps) + 1);

  SampleMatrix real = sample_mvn(truth.mu, truth_chol, cfg.n, rng);
  Vec mu = sample_mean(real);
  Mat sigma = sample_cov(real, mu);
  traj.steps.push_back({finite_or_inf(l2_sq_dist(mu, truth.mu)),
                        finite_or_inf(frob_sq_dist(sigma, truth.sigma)), false});
  if (observer) observer(0, mu, sigma);

  for (int t = 1; t <= steps; ++t) {
    if (!mu.allFinite() || !sigma.allFinite()) {
      traj.steps.push_back({kInf, kInf, traj.steps.back().clamped});
      continue;
    }
    GaussianStep step;
    const Mat factor = sampling_factor(sigma, step.clamped);
    const SampleMatrix synth = sample_mvn(mu, factor, cfg.m, rng);
    real = sample_mvn(truth.mu, truth_chol, cfg.n, rng);

    const Vec real_mean = sample_mean(real);
    const Vec synth_mean = sample_mean(synth);
    const Mat s_hat = sample_cov(real, real_mean);
    const Mat s_tilde = sample_cov(synth, synth_mean);

    mu = cfg.w * real_mean + (1.0 - cfg.w) * synth_mean;
    sigma = weighted_cov_update(s_hat, s_tilde, cfg.w);

    step.mean_err = finite_or_inf(l2_sq_dist(mu, truth.mu));
    step.cov_err = finite_or_inf(frob_sq_dist(sigma, truth.sigma));
    traj.steps.push_back(step);
    if (observer) observer(t, mu, sigma);
  }
  return traj;
}

Vec per_sample_weighted_mean(const SampleMatrix& real_xs, const SampleMatrix& synth_xs,
                             const PerSampleWeights& weights) {
  const auto n = real_xs.rows();
  const auto m = synth_xs.rows();
  if (n == 0 || m == 0) fail(ErrorCode::kEmptySample, "per_sample_weighted_mean: empty group");
  if (static_cast<Eigen::Index>(weights.real.size()) != n ||
      static_cast<Eigen::Index>(weights.synth.size()) != m ||
      real_xs.cols() != synth_xs.cols()) {
    fail(ErrorCode::kDimensionMismatch, "per_sample_weighted_mean: weight/sample mismatch");
  }
  const Eigen::Map<const Vec> wr(weights.real.data(), n);
  const Eigen::Map<const Vec> ws(weights.synth.data(), m);
  const double total = wr.sum() / static_cast<double>(n) + ws.sum() / static_cast<double>(m);
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorCode::kDomainError, "per_sample_weighted_mean: weights must average to 1");
  }
  return (real_xs.transpose() * wr) / static_cast<double>(n) +
         (synth_xs.transpose() * ws) / static_cast<double>(m);
}

std::vector<double> run_per_sample_mean_chain(const GaussianModel& truth,
                                              const PerSampleWeights& weights, int steps,
                                              RngStream& rng) {
  const int n = static_cast<int>(weights.real.size());
  const int m = static_cast<int>(weights.synth.size());
  if (n < 1 || m < 1) fail(ErrorCode::kEmptySample, "run_per_sample_mean_chain: empty group");
  const Mat chol = cholesky(truth.sigma);

  std::vector<double> errs;
  errs.reserve(static_cast<std::size_t>(steps) + 1);
  Vec mu = sample_mean(sample_mvn(truth.mu, chol, n, rng));
  errs.push_back(l2_sq_dist(mu, truth.mu));
  for (int t = 1; t <= steps; ++t) {
    const SampleMatrix synth = sample_mvn(mu, chol, m, rng);
    const SampleMatrix real = sample_mvn(truth.mu, chol, n, rng);
    mu = per_sample_weighted_mean(real, synth, weights);
    errs.push_back(finite_or_inf(l2_sq_dist(mu, truth.mu)));
  }
  return errs;
}

}  // namespace recmix
