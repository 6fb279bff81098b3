#include "recmix/analytics.h"

#include <cmath>
#include <limits>
#include <string>

#include "recmix/errors.h"

namespace recmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_weight(double w, const char* who) {
  if (!(w > 0.0 && w <= 1.0)) {
    fail(ErrorCode::kDomainError, std::string(who) + ": w must lie in (0, 1], got " +
                                      std::to_string(w));
  }
}

void require_ratio(double k, const char* who) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    fail(ErrorCode::kDomainError, std::string(who) + ": k must be positive and finite");
  }
}

void require_sizes(int n, int m, const char* who) {
  if (n < 2 || m < 2) fail(ErrorCode::kDomainError, std::string(who) + ": need n, m >= 2");
}

}  // namespace

double c_factor(double w, double k) {
  require_weight(w, "c_factor");
  require_ratio(k, "c_factor");
  const double u = 1.0 - w;
  return (w * w + u * u * k) / (w * (2.0 - w));
}

double optimal_weight(double k) {
  require_ratio(k, "optimal_weight");
  // 2 / (sqrt(1 + 4/k) + 1) is the same root without cancellation at large k.
  return 2.0 / (std::sqrt(1.0 + 4.0 / k) + 1.0);
}

double naive_weight(double k) {
  require_ratio(k, "naive_weight");
  return k / (k + 1.0);
}

double gaussian_mean_limit(double w, double k, int n, double tr_sigma) {
  if (n < 1) fail(ErrorCode::kDomainError, "gaussian_mean_limit: n must be >= 1");
  return c_factor(w, k) * tr_sigma / n;
}

double gaussian_cov_threshold(int m) {
  if (m < 2) fail(ErrorCode::kDomainError, "gaussian_cov_threshold: need m >= 2");
  return 1.0 - std::sqrt((m - 1.0) / (m + 1.0));
}

CovLimit gaussian_cov_limit(double w, int n, int m, double tr_sigma, double tr_sigma_sq) {
  require_weight(w, "gaussian_cov_limit");
  require_sizes(n, m, "gaussian_cov_limit");
  if (w <= gaussian_cov_threshold(m)) return {kInf, false};

  const double a = 2.0 * w - w * w;
  const double u2 = (w - 1.0) * (w - 1.0);
  const double n1 = n - 1.0;
  const double m1 = m - 1.0;
  const double tr2 = tr_sigma * tr_sigma;

  const double num = a * tr_sigma_sq +
                     u2 * (tr2 * a + 2.0 * w * w * tr_sigma_sq / n1) / (m1 * a) +
                     w * w * (tr2 + tr_sigma_sq) / n1;
  const double den = a - 2.0 * u2 * u2 / (m1 * m1 * a) - u2 / m1;
  if (std::abs(den) < 1e-13) return {kInf, true};
  return {num / den - tr_sigma_sq, false};
}

double gaussian_cov_limit_finite(double w, int n, int m, double tr_sigma, double tr_sigma_sq) {
  return gaussian_cov_limit(w, n, m, tr_sigma, tr_sigma_sq).value;
}

double glm_scaled_error(double w, double k, int t, double tr_sigma0_inv) {
  require_weight(w, "glm_scaled_error");
  require_ratio(k, "glm_scaled_error");
  if (t < 0) fail(ErrorCode::kDomainError, "glm_scaled_error: t must be >= 0");
  const double u2 = (1.0 - w) * (1.0 - w);
  const double inc = (u2 * k + w * w) * tr_sigma0_inv;
  double err = tr_sigma0_inv;
  for (int s = 0; s < t; ++s) {
    const double next = u2 * err + inc;
    if (next == err) break;  // fixed point reached in floating point
    err = next;
  }
  return err;
}

double glm_limit_error(double w, double k, double tr_sigma0_inv) {
  return c_factor(w, k) * tr_sigma0_inv;
}

double cov_opnorm_beta(double w, double k, int T) {
  require_weight(w, "cov_opnorm_beta");
  require_ratio(k, "cov_opnorm_beta");
  if (T < 0) fail(ErrorCode::kDomainError, "cov_opnorm_beta: T must be >= 0");
  const double u = 1.0 - w;
  const double decay = std::pow(u, 2.0 * T);
  return decay + (u * u * k + w * w) * (1.0 - decay) / (w * (2.0 - w));
}

double cdf_limit_error(double w, int n, int m) {
  require_weight(w, "cdf_limit_error");
  require_sizes(n, m, "cdf_limit_error");
  const double u2 = (1.0 - w) * (1.0 - w);
  return (w * w / n + u2 / m) / (6.0 * (1.0 - u2 * (1.0 - 1.0 / m)));
}

double cdf_optimal_weight(int n, int m) {
  require_sizes(n, m, "cdf_optimal_weight");
  // Stationarity in u = 1 - w: (m-1) u^2 - (2m+n-1) u + m = 0, smaller root.
  const double nn = n;
  const double mm = m;
  const double b = 2.0 * mm + nn - 1.0;
  const double disc = nn * nn + 4.0 * mm * nn - 2.0 * nn + 1.0;
  // Product of roots is m / (m-1); take the small one as c / q.
  const double u = 2.0 * mm / (b + std::sqrt(disc));
  return 1.0 - u;
}

double cdf_no_improvement_threshold(int n, int m) {
  require_sizes(n, m, "cdf_no_improvement_threshold");
  return (n - 1.0) / (n + 2.0 * m - 1.0);
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::kCollapse:
      return "collapse";
    case Regime::kNoImprovement:
      return "no_improvement";
    case Regime::kImprovement:
      return "improvement";
  }
  return "unknown";
}

Regime classify_regime(RegimeSetting setting, double w, int n, int m, double tr_sigma,
                       double tr_sigma_sq) {
  require_weight(w, "classify_regime");
  require_sizes(n, m, "classify_regime");
  switch (setting) {
    case RegimeSetting::kGaussianCov: {
      const double here = gaussian_cov_limit_finite(w, n, m, tr_sigma, tr_sigma_sq);
      if (std::isinf(here)) return Regime::kCollapse;
      const double real_only = gaussian_cov_limit_finite(1.0, n, m, tr_sigma, tr_sigma_sq);
      return here < real_only ? Regime::kImprovement : Regime::kNoImprovement;
    }
    case RegimeSetting::kCdf:
      return w <= cdf_no_improvement_threshold(n, m) ? Regime::kNoImprovement
                                                     : Regime::kImprovement;
  }
  fail(ErrorCode::kDomainError, "classify_regime: unknown setting");
}

}  // namespace recmix
