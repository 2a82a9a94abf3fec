#include "nftrack/motion.hpp"

#include "nftrack/gaussian.hpp"

namespace nftrack {

MotionModel make_ncv(double tau, double sigma2_ax, double sigma2_ay, double sigma2_az) {
  if (!(tau > 0.0)) throw Error("time step must be positive");
  if (!(sigma2_ax >= 0.0 && sigma2_ay >= 0.0 && sigma2_az >= 0.0)) {
    throw Error("acceleration variances must be non-negative");
  }
  MotionModel m;
  m.tau = tau;
  m.accel_variance = Vec3(sigma2_ax, sigma2_ay, sigma2_az);
  m.A.setIdentity();
  m.A.topRightCorner<3, 3>() = tau * Mat3::Identity();

  const Mat3 qa = m.accel_variance.asDiagonal();
  m.Q.topLeftCorner<3, 3>() = tau * tau * tau / 3.0 * qa;
  m.Q.topRightCorner<3, 3>() = tau * tau / 2.0 * qa;
  m.Q.bottomLeftCorner<3, 3>() = tau * tau / 2.0 * qa;
  m.Q.bottomRightCorner<3, 3>() = tau * qa;
  m.noise_factor = psd_factor(m.Q);
  return m;
}

MotionModel scaled_ncv(const MotionModel& base, double gamma) {
  if (!(gamma >= 0.0)) throw Error("transition mismatch factor must be non-negative");
  const Vec3 v = gamma * base.accel_variance;
  return make_ncv(base.tau, v.x(), v.y(), v.z());
}

State propagate(const MotionModel& model, const State& s, Rng& rng) {
  return sample_gaussian(model.A * s, model.noise_factor, rng);
}

Mat6 regularized_process_covariance(const MotionModel& model, bool* regularized) {
  const double max_diag = model.Q.diagonal().maxCoeff();
  const double eps = max_diag > 0.0 ? 1e-12 * max_diag : 1e-12;
  bool changed = false;
  for (int i = 0; i < kStateDim; ++i) changed = changed || model.Q(i, i) == 0.0;
  if (regularized != nullptr) *regularized = changed;
  return floor_zero_variances(model.Q, eps);
}

}  // namespace nftrack
