// Gaussian beliefs over the source state and small helpers around them.
#pragma once

#include "nftrack/random.hpp"
#include "nftrack/types.hpp"

namespace nftrack {

struct GaussianBelief {
  State mean = State::Zero();
  Mat6 covariance = Mat6::Identity();
};

/// Factor L with L L^T = m for a symmetric PSD matrix. Rows and columns of
/// m that are identically zero produce zero rows of L, so degenerate
/// coordinates are sampled without noise.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m);

/// One draw from N(mean, L L^T).
State sample_gaussian(const State& mean, const Mat6& factor, Rng& rng);

/// log N(x; mean, cov). Throws if cov is not positive definite.
double gaussian_log_density(const State& x, const State& mean, const Mat6& cov);

/// Gaussian log density with a pre-computed Cholesky factorisation.
class GaussianDensity {
 public:
  explicit GaussianDensity(const Mat6& cov);
  double log_density(const State& x, const State& mean) const;
  const Mat6& covariance() const { return cov_; }

 private:
  Mat6 cov_;
  Eigen::LLT<Mat6> llt_;
  double log_norm_ = 0.0;
};

/// Copy of cov with every zero diagonal entry replaced by `floor`.
Mat6 floor_zero_variances(const Mat6& cov, double floor);

/// (m + m^T) / 2
inline Mat6 symmetrized(const Mat6& m) { return 0.5 * (m + m.transpose()); }

/// Moore-Penrose inverse of a symmetric matrix. Eigenvalues below
/// tol * max|eigenvalue| are treated as zero; `rank` receives the count kept.
Mat6 symmetric_pinv(const Mat6& m, double tol, int* rank = nullptr);

}  // namespace nftrack
