#include "recmix/linalg_stats.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "recmix/errors.h"

namespace recmix {

namespace {

void require_square(const Mat& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(what) + ": expected a non-empty square matrix, got " +
             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_same_shape(const Mat& a, const Mat& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::kDimensionMismatch, std::string(what) + ": shape mismatch");
  }
}

}  // namespace

Mat cholesky(const Mat& a) {
  require_square(a, "cholesky");
  const Eigen::Index p = a.rows();
  const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
  const double negative_tol = 1e-10 * scale;
  const double zero_tol = 1e-14 * scale;

  Mat l = Mat::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (pivot < -negative_tol) {
      fail(ErrorCode::kNotPsd, "cholesky: pivot " + std::to_string(pivot) +
                                   " at index " + std::to_string(j));
    }
    if (pivot <= zero_tol) {
      // Semidefinite direction: the rest of the column must vanish too.
      for (Eigen::Index i = j + 1; i < p; ++i) {
        const double residual = a(i, j) - l.row(i).head(j).dot(l.row(j).head(j));
        if (std::abs(residual) > 1e-8 * scale) {
          fail(ErrorCode::kNotPsd, "cholesky: zero pivot with nonzero coupling at index " +
                                       std::to_string(j));
        }
      }
      continue;
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < p; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / d;
    }
  }
  return l;
}

Mat clamp_to_psd(const Mat& a) {
  require_square(a, "clamp_to_psd");
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  const Vec clamped = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
}

bool is_psd(const Mat& a) {
  if (a.rows() != a.cols() || a.rows() == 0) return false;
  if (!a.allFinite()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) return false;
  Eigen::LLT<Mat> llt(a + 1e-12 * Mat::Identity(a.rows(), a.cols()));
  return llt.info() == Eigen::Success;
}

SampleMatrix sample_mvn(const Vec& mean, const Mat& chol, int count, RngStream& rng) {
  if (chol.rows() != mean.size() || chol.cols() != mean.size()) {
    fail(ErrorCode::kDimensionMismatch, "sample_mvn: chol must be p x p with p = mean size");
  }
  const Eigen::Index p = mean.size();
  SampleMatrix z(count, p);
  for (int i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(i, j) = rng.normal();
  }
  // Row form of mean + L z: z^T L^T + mean^T.
  SampleMatrix out = z * chol.transpose().triangularView<Eigen::Upper>();
  out.rowwise() += mean.transpose();
  return out;
}

Vec sample_mean(const SampleMatrix& xs) {
  if (xs.rows() == 0) fail(ErrorCode::kEmptySample, "sample_mean: no samples");
  return xs.colwise().mean().transpose();
}

Mat sample_cov(const SampleMatrix& xs, const Vec& center) {
  if (xs.rows() < 2) {
    fail(ErrorCode::kTooFewSamples, "sample_cov: need at least 2 samples, got " +
                                        std::to_string(xs.rows()));
  }
  if (center.size() != xs.cols()) {
    fail(ErrorCode::kDimensionMismatch, "sample_cov: center dimension mismatch");
  }
  const SampleMatrix centered = xs.rowwise() - center.transpose();
  Mat cov = Mat::Zero(xs.cols(), xs.cols());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  cov /= static_cast<double>(xs.rows() - 1);
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  return cov;
}

double trace(const Mat& a) {
  require_square(a, "trace");
  return a.trace();
}

double trace_of_square(const Mat& a) {
  require_square(a, "trace_of_square");
  return a.cwiseProduct(a.transpose()).sum();
}

double frob_sq_dist(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "frob_sq_dist");
  return (a - b).squaredNorm();
}

double l2_sq_dist(const Vec& u, const Vec& v) {
  if (u.size() != v.size()) fail(ErrorCode::kDimensionMismatch, "l2_sq_dist: size mismatch");
  return (u - v).squaredNorm();
}

}  // namespace recmix
