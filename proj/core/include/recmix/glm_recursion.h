#pragma once

#include <string>
#include <vector>

#include "recmix/gaussian_recursion.h"
#include "recmix/linalg_stats.h"
#include "recmix/mix_config.h"
#include "recmix/rng.h"

namespace recmix {

enum class GlmKind { kLinear, kLogistic, kPoisson };

// Scalar-response GLM with canonical link. Poisson uses mean exp(x^T theta).
struct GlmFamily {
  GlmKind kind = GlmKind::kLinear;
  double noise_sd = 1.0;  // linear only

  static GlmFamily linear(double noise_sd);
  static GlmFamily logistic();
  static GlmFamily poisson();

  std::string name() const;
  void validate() const;
};

// Covariate rows in `x`, one response per row in `y`.
struct GlmData {
  SampleMatrix x;
  Vec y;

  Eigen::Index size() const { return x.rows(); }
};

struct GlmProblem {
  GlmFamily family;
  Vec theta_star;
  GaussianModel covariate_law;  // law of one covariate row
};

// Exceeding this Poisson mean raises PoissonOverflow.
inline constexpr double kPoissonMeanLimit = 1e9;

double glm_response(const GlmFamily& family, const Vec& x, const Vec& theta, RngStream& rng);
Vec glm_responses(const GlmFamily& family, const SampleMatrix& x, const Vec& theta,
                  RngStream& rng);

// Weighted negative log-likelihood
//   (w/n) sum_real -log p(y|x,theta) + ((1-w)/m) sum_synth -log p(y|x,theta)
// with theta-free constants dropped: log(2 pi sd^2)/2 for the linear family
// and log(y!) for Poisson. A group with zero weight may be empty.
double weighted_nll(const GlmFamily& family, const Vec& theta, const GlmData& real,
                    const GlmData& synth, double w);

struct NllDerivatives {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
};

NllDerivatives weighted_nll_derivatives(const GlmFamily& family, const Vec& theta,
                                        const GlmData& real, const GlmData& synth, double w);

struct FitResult {
  Vec theta;
  int iterations = 0;
};

inline constexpr int kMaxNewtonIterations = 100;

// Minimizer of weighted_nll. The linear family is solved through the
// weighted normal equations; logistic and Poisson use Newton's method with
// step halving, stopping once ||grad|| <= 1e-8 (1 + ||grad at init||).
// Throws SingularHessian when the system stays singular after one 1e-8 ridge
// retry, and NoConvergence after kMaxNewtonIterations.
FitResult fit_weighted_mle(const GlmFamily& family, const GlmData& real, const GlmData& synth,
                           double w, const Vec& init);

// Where a GLM chain gets its real data and synthetic covariates from.
class GlmDataSource {
 public:
  virtual ~GlmDataSource() = default;

  virtual int dim() const = 0;
  virtual GlmData real_batch(int n, RngStream& rng) const = 0;
  virtual SampleMatrix covariates(int m, RngStream& rng) const = 0;
};

// Covariates from the problem's covariate law, real responses from theta*.
class SimulatedGlmSource : public GlmDataSource {
 public:
  explicit SimulatedGlmSource(const GlmProblem& problem);

  int dim() const override;
  GlmData real_batch(int n, RngStream& rng) const override;
  SampleMatrix covariates(int m, RngStream& rng) const override;

 private:
  GlmProblem problem_;
  Mat covariate_chol_;
};

struct GlmStep {
  double theta_err = 0.0;  // ||theta_t - theta*||_2^2
  int newton_iters = 0;
  bool converged = true;
};

struct GlmTrajectory {
  std::vector<GlmStep> steps;  // t = 0..T
  bool failed = false;
  std::string failure;  // error text when failed

  std::vector<double> theta_errors() const;
};

// Step 0 fits theta_0 on n real pairs. Step t draws n fresh real pairs and m
// synthetic covariates whose responses come from theta_{t-1}, then fits the
// weighted MLE warm-started at theta_{t-1} (cold start at 0 on
// NoConvergence). A failed fit or a Poisson overflow marks the replication
// failed; the remaining steps hold +inf.
GlmTrajectory run_glm_chain(const GlmFamily& family, const GlmDataSource& source,
                            const Vec& theta_star, const MixConfig& cfg, int steps,
                            RngStream& rng);
GlmTrajectory run_glm_chain(const GlmProblem& problem, const MixConfig& cfg, int steps,
                            RngStream& rng);

// Sigma_0 = E[x x^T A''(x^T theta*)]: exact for the linear family, Monte
// Carlo over `draws` covariate rows otherwise.
Mat fisher_information(const GlmProblem& problem, RngStream& rng, int draws = 1'000'000);

}  // namespace recmix
