// Posterior Cramér-Rao bound through the recursive Bayesian information update.
#pragma once

#include "nftrack/gaussian.hpp"
#include "nftrack/motion.hpp"
#include "nftrack/observation.hpp"
#include "nftrack/random.hpp"

#include <cstdint>
#include <vector>

namespace nftrack {

/// Σ₀⁻¹ with zero prior variances floored at 1e-12. Throws if the floored
/// covariance is still singular.
Mat6 prior_fim(const GaussianBelief& belief);

struct RecursionStep {
  Mat6 information = Mat6::Zero();
  /// Set when the inner matrix J_prev + D11 had to be pseudo-inverted.
  bool regularized = false;
};

/// J_k = D22 - D21 (J_prev + D11)⁻¹ D12 with D11 = AᵀQ⁻¹A, D12 = -AᵀQ⁻¹,
/// D22 = Q⁻¹ + J_D. Q is regularized when singular.
RecursionStep recursion_step(const Mat6& j_prev, const MotionModel& motion,
                             const Mat6& expected_data_fim);

struct DataFimEstimate {
  Mat6 mean = Mat6::Zero();
  /// Trajectories redrawn because they touched the polar-axis singularity.
  int resampled = 0;
};

/// E[J̃_D(s_k)] over n_traj trajectories: s_1 drawn from the prior, then
/// k - 1 propagations through `motion`. Step k is 1-based.
DataFimEstimate expected_data_fim_mc(const MeasurementModel& model, const MotionModel& motion,
                                     const GaussianBelief& prior, int k, int n_traj, Rng& rng);

struct PcrlbSetup {
  MeasurementModel model;
  MotionModel motion;
  GaussianBelief prior;
  int steps = 20;
  int n_traj = 200;
  std::uint64_t seed = 1;
};

struct PcrlbStep {
  int k = 0;
  Mat6 information = Mat6::Zero();
  Mat6 covariance = Mat6::Zero();
  /// sqrt(trace of the position block of the bound), metres.
  double peb = 0.0;
  bool regularized = false;
};

struct PcrlbTrace {
  std::vector<PcrlbStep> steps;
  bool process_noise_regularized = false;
  int resampled_trajectories = 0;
};

/// Full K-step bound. Step 1 combines the prior with the first
/// measurement; later steps apply the recursion.
PcrlbTrace run_pcrlb(const PcrlbSetup& setup);

/// Variant with a caller-supplied expected data FIM per step (size K).
PcrlbTrace run_pcrlb(const GaussianBelief& prior, const MotionModel& motion,
                     const std::vector<Mat6>& expected_data_fims);

}  // namespace nftrack
