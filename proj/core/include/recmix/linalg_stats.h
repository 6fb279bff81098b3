#pragma once

#include <Eigen/Dense>

#include "recmix/rng.h"

namespace recmix {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Observations are stored one per row: an n x p matrix holds n draws of a
// p-dimensional vector.
using SampleMatrix = Eigen::MatrixXd;

// Lower-triangular factor L with L * L^T == a. Semidefinite inputs are
// accepted: a pivot in [-1e-10 * scale, tiny] yields a zero column. A pivot
// below -1e-10 * scale throws NotPsd.
Mat cholesky(const Mat& a);

// Symmetrizes `a` and replaces negative eigenvalues by zero.
Mat clamp_to_psd(const Mat& a);

// True when `a` is square, symmetric to 1e-10 relative tolerance and
// Cholesky succeeds on a + 1e-12 I.
bool is_psd(const Mat& a);

// `count` rows, each mean + chol * z with z ~ N(0, I).
SampleMatrix sample_mvn(const Vec& mean, const Mat& chol, int count, RngStream& rng);

Vec sample_mean(const SampleMatrix& xs);

// Unbiased (n - 1)-denominator covariance around `center`. Exactly symmetric.
Mat sample_cov(const SampleMatrix& xs, const Vec& center);

double trace(const Mat& a);
// tr(A^2) = sum_ij a_ij a_ji.
double trace_of_square(const Mat& a);
double frob_sq_dist(const Mat& a, const Mat& b);
double l2_sq_dist(const Vec& u, const Vec& v);

}  // namespace recmix
