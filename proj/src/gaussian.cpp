#include "nftrack/gaussian.hpp"

#include <cmath>
#include <vector>

namespace nftrack {

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m.row(i).cwiseAbs().maxCoeff() > 0.0) active.push_back(i);
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  if (active.empty()) return out;

  const auto k = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = m(active[i], active[j]);
  }
  Eigen::MatrixXd sub_factor;
  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  if (llt.info() == Eigen::Success) {
    sub_factor = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub);
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    sub_factor = eig.eigenvectors() * root.asDiagonal();
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) out(active[i], active[j]) = sub_factor(i, j);
  }
  return out;
}

State sample_gaussian(const State& mean, const Mat6& factor, Rng& rng) {
  State u;
  for (int i = 0; i < kStateDim; ++i) u(i) = rng.normal();
  return mean + factor * u;
}

GaussianDensity::GaussianDensity(const Mat6& cov) : cov_(cov), llt_(cov) {
  if (llt_.info() != Eigen::Success) throw Error("covariance is not positive definite");
  const Mat6 l = llt_.matrixL();
  double log_det = 0.0;
  for (int i = 0; i < kStateDim; ++i) log_det += 2.0 * std::log(l(i, i));
  log_norm_ = -0.5 * (kStateDim * std::log(kTwoPi) + log_det);
}

double GaussianDensity::log_density(const State& x, const State& mean) const {
  const State w = llt_.matrixL().solve(x - mean);
  return log_norm_ - 0.5 * w.squaredNorm();
}

double gaussian_log_density(const State& x, const State& mean, const Mat6& cov) {
  return GaussianDensity(cov).log_density(x, mean);
}

Mat6 floor_zero_variances(const Mat6& cov, double floor) {
  Mat6 out = cov;
  for (int i = 0; i < kStateDim; ++i) {
    if (out(i, i) == 0.0) out(i, i) = floor;
  }
  return out;
}

Mat6 symmetric_pinv(const Mat6& m, double tol, int* rank) {
  Eigen::SelfAdjointEigenSolver<Mat6> eig(symmetrized(m));
  const auto& values = eig.eigenvalues();
  const double cutoff = tol * values.cwiseAbs().maxCoeff();
  Eigen::Matrix<double, kStateDim, 1> inv = Eigen::Matrix<double, kStateDim, 1>::Zero();
  int kept = 0;
  for (int i = 0; i < kStateDim; ++i) {
    if (std::abs(values(i)) > cutoff && values(i) != 0.0) {
      inv(i) = 1.0 / values(i);
      ++kept;
    }
  }
  if (rank != nullptr) *rank = kept;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace nftrack
