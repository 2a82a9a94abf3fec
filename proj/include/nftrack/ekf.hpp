// Extended Kalman filter: measurement update followed by time update.
#pragma once

#include "nftrack/gaussian.hpp"
#include "nftrack/motion.hpp"
#include "nftrack/observation_model.hpp"

namespace nftrack {

struct EkfStepResult {
  /// m_{k|k}, P_{k|k}; the state estimate is posterior.mean.
  GaussianBelief posterior;
  /// m_{k+1|k}, P_{k+1|k}.
  GaussianBelief predicted;
  /// Innovation covariance was singular and had to be regularized.
  bool regularized = false;
};

/// One EKF cycle from the predicted belief m_{k|k-1}, P_{k|k-1}.
///
/// The innovation is the model residual of z against h(m_{k|k-1}). With
/// R = σ² I the update is carried out in the 6-dim factor space: for
/// P = L Lᵀ and B = H L, K = L (σ² I + BᵀB)⁻¹ Bᵀ and
/// P_{k|k} = σ² L (σ² I + BᵀB)⁻¹ Lᵀ, which equal the textbook
/// K = P Hᵀ S⁻¹, P - K S Kᵀ without forming the N x N matrix S.
EkfStepResult ekf_step(const GaussianBelief& predicted, const Eigen::VectorXd& z,
                       const ObservationModel& obs, const MotionModel& motion);

}  // namespace nftrack
