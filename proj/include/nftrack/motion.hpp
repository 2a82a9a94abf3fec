// Nearly-constant-velocity transition model.
#pragma once

#include "nftrack/random.hpp"
#include "nftrack/types.hpp"

namespace nftrack {

struct MotionModel {
  Mat6 A = Mat6::Identity();
  Mat6 Q = Mat6::Zero();
  double tau = 1.0;
  /// Diagonal of Qa: acceleration variances per axis (m^2/step^6).
  Vec3 accel_variance = Vec3::Zero();
  /// L with L L^T = Q; rows of noiseless coordinates are exactly zero.
  Mat6 noise_factor = Mat6::Zero();
};

MotionModel make_ncv(double tau, double sigma2_ax, double sigma2_ay, double sigma2_az);

/// Same model with Qa scaled by `gamma` (tracker-side transition mismatch).
MotionModel scaled_ncv(const MotionModel& base, double gamma);

/// A s + w, w ~ N(0, Q).
State propagate(const MotionModel& model, const State& s, Rng& rng);

/// Q with zero diagonal entries replaced by 1e-12 * max diag(Q), so that
/// Q^-1 exists when some axis is noiseless.
Mat6 regularized_process_covariance(const MotionModel& model, bool* regularized = nullptr);

}  // namespace nftrack
