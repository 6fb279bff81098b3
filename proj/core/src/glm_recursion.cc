#include "recmix/glm_recursion.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "recmix/errors.h"

namespace recmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// Per-observation -log p(y | eta), theta-free constants dropped.
double unit_nll(const GlmFamily& family, double eta, double y) {
  switch (family.kind) {
    case GlmKind::kLinear: {
      const double r = (y - eta) / family.noise_sd;
      return 0.5 * r * r;
    }
    case GlmKind::kLogistic:
      return softplus(eta) - y * eta;
    case GlmKind::kPoisson:
      return std::exp(eta) - y * eta;
  }
  return 0.0;
}

// First and second derivative of unit_nll in eta.
void unit_derivatives(const GlmFamily& family, double eta, double y, double& d1, double& d2) {
  switch (family.kind) {
    case GlmKind::kLinear: {
      const double inv_var = 1.0 / (family.noise_sd * family.noise_sd);
      d1 = (eta - y) * inv_var;
      d2 = inv_var;
      return;
    }
    case GlmKind::kLogistic: {
      const double mu = sigmoid(eta);
      d1 = mu - y;
      d2 = mu * (1.0 - mu);
      return;
    }
    case GlmKind::kPoisson: {
      const double mu = std::exp(eta);
      d1 = mu - y;
      d2 = mu;
      return;
    }
  }
}

double group_scale(double weight, Eigen::Index count) {
  return count > 0 ? weight / static_cast<double>(count) : 0.0;
}

void check_groups(const GlmData& real, const GlmData& synth, double w, Eigen::Index p) {
  if (w > 0.0 && real.size() == 0) {
    fail(ErrorCode::kEmptySample, "weighted_nll: real data empty with positive weight");
  }
  if (w < 1.0 && synth.size() == 0) {
    fail(ErrorCode::kEmptySample, "weighted_nll: synthetic data empty with positive weight");
  }
  for (const GlmData* d : {&real, &synth}) {
    if (d->size() > 0 && (d->x.cols() != p || d->y.size() != d->x.rows())) {
      fail(ErrorCode::kDimensionMismatch, "weighted_nll: data shape mismatch");
    }
  }
}

void accumulate(const GlmFamily& family, const Vec& theta, const GlmData& data, double scale,
                NllDerivatives& out) {
  if (scale == 0.0 || data.size() == 0) return;
  const Vec eta = data.x * theta;
  Vec d1(eta.size());
  Vec d2(eta.size());
  double value = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    value += unit_nll(family, eta[i], data.y[i]);
    unit_derivatives(family, eta[i], data.y[i], d1[i], d2[i]);
  }
  out.value += scale * value;
  out.gradient.noalias() += scale * (data.x.transpose() * d1);
  const SampleMatrix weighted = data.x.array().colwise() * (scale * d2).array();
  out.hessian.noalias() += data.x.transpose() * weighted;
}

double group_nll(const GlmFamily& family, const Vec& theta, const GlmData& data, double scale) {
  if (scale == 0.0 || data.size() == 0) return 0.0;
  const Vec eta = data.x * theta;
  double value = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) value += unit_nll(family, eta[i], data.y[i]);
  return scale * value;
}

// Solves H d = rhs; retries once with a 1e-8 ridge.
Vec solve_spd(const Mat& h, const Vec& rhs) {
  Eigen::LLT<Mat> llt(h);
  if (llt.info() == Eigen::Success) {
    Vec d = llt.solve(rhs);
    if (d.allFinite()) return d;
  }
  const Mat ridged = h + 1e-8 * Mat::Identity(h.rows(), h.cols());
  Eigen::LLT<Mat> retry(ridged);
  if (retry.info() == Eigen::Success) {
    Vec d = retry.solve(rhs);
    if (d.allFinite()) return d;
  }
  fail(ErrorCode::kSingularHessian, "weighted MLE: Hessian is singular");
}

FitResult fit_linear(const GlmFamily& family, const GlmData& real, const GlmData& synth,
                     double w, Eigen::Index p) {
  NllDerivatives at_zero = weighted_nll_derivatives(family, Vec::Zero(p), real, synth, w);
  // Quadratic objective: the minimizer solves H theta = -grad(0).
  FitResult fit;
  fit.theta = solve_spd(at_zero.hessian, -at_zero.gradient);
  fit.iterations = 1;
  return fit;
}

}  // namespace

GlmFamily GlmFamily::linear(double noise_sd) {
  GlmFamily f;
  f.kind = GlmKind::kLinear;
  f.noise_sd = noise_sd;
  f.validate();
  return f;
}

GlmFamily GlmFamily::logistic() {
  GlmFamily f;
  f.kind = GlmKind::kLogistic;
  return f;
}

GlmFamily GlmFamily::poisson() {
  GlmFamily f;
  f.kind = GlmKind::kPoisson;
  return f;
}

std::string GlmFamily::name() const {
  switch (kind) {
    case GlmKind::kLinear: return "linear";
    case GlmKind::kLogistic: return "logistic";
    case GlmKind::kPoisson: return "poisson";
  }
  return "unknown";
}

void GlmFamily::validate() const {
  if (kind == GlmKind::kLinear && !(std::isfinite(noise_sd) && noise_sd > 0.0)) {
    fail(ErrorCode::kDomainError, "linear family needs a finite positive noise_sd");
  }
}

double glm_response(const GlmFamily& family, const Vec& x, const Vec& theta, RngStream& rng) {
  if (x.size() != theta.size()) {
    fail(ErrorCode::kDimensionMismatch, "glm_response: x and theta differ in size");
  }
  const double eta = x.dot(theta);
  switch (family.kind) {
    case GlmKind::kLinear:
      return eta + family.noise_sd * rng.normal();
    case GlmKind::kLogistic:
      return rng.bernoulli(sigmoid(eta)) ? 1.0 : 0.0;
    case GlmKind::kPoisson: {
      const double mean = std::exp(eta);
      if (!(mean <= kPoissonMeanLimit)) {
        fail(ErrorCode::kPoissonOverflow, "Poisson mean exp(" + std::to_string(eta) +
                                              ") exceeds " + std::to_string(kPoissonMeanLimit));
      }
      return static_cast<double>(rng.poisson(mean));
    }
  }
  return 0.0;
}

Vec glm_responses(const GlmFamily& family, const SampleMatrix& x, const Vec& theta,
                  RngStream& rng) {
  Vec y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    y[i] = glm_response(family, x.row(i).transpose(), theta, rng);
  }
  return y;
}

double weighted_nll(const GlmFamily& family, const Vec& theta, const GlmData& real,
                    const GlmData& synth, double w) {
  check_groups(real, synth, w, theta.size());
  return group_nll(family, theta, real, group_scale(w, real.size())) +
         group_nll(family, theta, synth, group_scale(1.0 - w, synth.size()));
}

NllDerivatives weighted_nll_derivatives(const GlmFamily& family, const Vec& theta,
                                        const GlmData& real, const GlmData& synth, double w) {
  check_groups(real, synth, w, theta.size());
  NllDerivatives out;
  out.gradient = Vec::Zero(theta.size());
  out.hessian = Mat::Zero(theta.size(), theta.size());
  accumulate(family, theta, real, group_scale(w, real.size()), out);
  accumulate(family, theta, synth, group_scale(1.0 - w, synth.size()), out);
  return out;
}

FitResult fit_weighted_mle(const GlmFamily& family, const GlmData& real, const GlmData& synth,
                           double w, const Vec& init) {
  family.validate();
  const Eigen::Index p = init.size();
  if (family.kind == GlmKind::kLinear) return fit_linear(family, real, synth, w, p);

  Vec theta = init;
  NllDerivatives current = weighted_nll_derivatives(family, theta, real, synth, w);
  const double tol = 1e-8 * (1.0 + current.gradient.norm());

  for (int iter = 0; iter < kMaxNewtonIterations; ++iter) {
    if (current.gradient.norm() <= tol) return {theta, iter};
    if (!std::isfinite(current.value)) break;

    const Vec direction = solve_spd(current.hessian, -current.gradient);
    const double slope = current.gradient.dot(direction);
    const double slack = 1e-13 * std::abs(current.value);

    double step = 1.0;
    Vec candidate = theta + direction;
    double value = weighted_nll(family, candidate, real, synth, w);
    int halvings = 0;
    while (!(value <= current.value + 1e-4 * step * slope + slack) && halvings < 60) {
      step *= 0.5;
      candidate = theta + step * direction;
      value = weighted_nll(family, candidate, real, synth, w);
      ++halvings;
    }
    if (!(value <= current.value + slack)) break;  // no descent possible
    theta = candidate;
    current = weighted_nll_derivatives(family, theta, real, synth, w);
  }
  if (current.gradient.norm() <= tol) return {theta, kMaxNewtonIterations};
  fail(ErrorCode::kNoConvergence, family.name() + " weighted MLE: gradient norm " +
                                      std::to_string(current.gradient.norm()) +
                                      " above tolerance " + std::to_string(tol));
}

SimulatedGlmSource::SimulatedGlmSource(const GlmProblem& problem)
    : problem_(problem), covariate_chol_(cholesky(problem.covariate_law.sigma)) {
  problem_.family.validate();
  if (problem_.theta_star.size() != problem_.covariate_law.mu.size()) {
    fail(ErrorCode::kDimensionMismatch, "GlmProblem: theta* and covariate law differ in size");
  }
}

int SimulatedGlmSource::dim() const { return static_cast<int>(problem_.theta_star.size()); }

GlmData SimulatedGlmSource::real_batch(int n, RngStream& rng) const {
  GlmData d;
  d.x = covariates(n, rng);
  d.y = glm_responses(problem_.family, d.x, problem_.theta_star, rng);
  return d;
}

SampleMatrix SimulatedGlmSource::covariates(int m, RngStream& rng) const {
  return sample_mvn(problem_.covariate_law.mu, covariate_chol_, m, rng);
}

std::vector<double> GlmTrajectory::theta_errors() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.theta_err);
  return out;
}

GlmTrajectory run_glm_chain(const GlmFamily& family, const GlmDataSource& source,
                            const Vec& theta_star, const MixConfig& cfg, int steps,
                            RngStream& rng) {
  cfg.validate();
  if (steps < 1) fail(ErrorCode::kDomainError, "run_glm_chain: steps must be >= 1");
  const Eigen::Index p = source.dim();

  GlmTrajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(steps) + 1);
  auto mark_failed = [&](const Error& e) {
    traj.failed = true;
    traj.failure = e.what();
    while (static_cast<int>(traj.steps.size()) <= steps) {
      traj.steps.push_back({kInf, 0, false});
    }
  };

  Vec theta;
  try {
    const GlmData initial = source.real_batch(cfg.n, rng);
    const FitResult fit = fit_weighted_mle(family, initial, GlmData{}, 1.0, Vec::Zero(p));
    theta = fit.theta;
    traj.steps.push_back({l2_sq_dist(theta, theta_star), fit.iterations, true});
  } catch (const Error& e) {
    mark_failed(e);
    return traj;
  }

  for (int t = 1; t <= steps; ++t) {
    try {
      const GlmData real = source.real_batch(cfg.n, rng);
      GlmData synth;
      synth.x = source.covariates(cfg.m, rng);
      synth.y = glm_responses(family, synth.x, theta, rng);

      FitResult fit;
      try {
        fit = fit_weighted_mle(family, real, synth, cfg.w, theta);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoConvergence) throw;
        fit = fit_weighted_mle(family, real, synth, cfg.w, Vec::Zero(p));
      }
      theta = fit.theta;
      const double err = l2_sq_dist(theta, theta_star);
      traj.steps.push_back({std::isfinite(err) ? err : kInf, fit.iterations, true});
    } catch (const Error& e) {
      mark_failed(e);
      return traj;
    }
  }
  return traj;
}

GlmTrajectory run_glm_chain(const GlmProblem& problem, const MixConfig& cfg, int steps,
                            RngStream& rng) {
  const SimulatedGlmSource source(problem);
  return run_glm_chain(problem.family, source, problem.theta_star, cfg, steps, rng);
}

Mat fisher_information(const GlmProblem& problem, RngStream& rng, int draws) {
  const auto& law = problem.covariate_law;
  if (problem.family.kind == GlmKind::kLinear) {
    const double var = problem.family.noise_sd * problem.family.noise_sd;
    return (law.sigma + law.mu * law.mu.transpose()) / var;
  }
  const Mat chol = cholesky(law.sigma);
  const Eigen::Index p = problem.theta_star.size();
  Mat info = Mat::Zero(p, p);
  constexpr int kBatch = 10'000;
  for (int done = 0; done < draws; done += kBatch) {
    const int count = std::min(kBatch, draws - done);
    const SampleMatrix x = sample_mvn(law.mu, chol, count, rng);
    const Vec eta = x * problem.theta_star;
    Vec curvature(count);
    for (int i = 0; i < count; ++i) {
      double d1 = 0.0;
      unit_derivatives(problem.family, eta[i], 0.0, d1, curvature[i]);
    }
    const SampleMatrix weighted = x.array().colwise() * curvature.array();
    info.noalias() += x.transpose() * weighted;
  }
  return info / static_cast<double>(draws);
}

}  // namespace recmix
