#include "nftrack/pcrlb.hpp"

#include "nftrack/fisher.hpp"

#include <algorithm>
#include <cmath>

namespace nftrack {

namespace {

constexpr double kPriorVarianceFloor = 1e-12;
constexpr int kMaxRedraws = 100;

// Inverse of a symmetric matrix expected to be positive definite; falls
// back to the pseudo-inverse and reports it.
Mat6 spd_inverse(const Mat6& m, bool* fallback) {
  Eigen::LLT<Mat6> llt(m);
  if (llt.info() == Eigen::Success) {
    if (fallback != nullptr) *fallback = false;
    return symmetrized(llt.solve(Mat6::Identity()));
  }
  if (fallback != nullptr) *fallback = true;
  return symmetric_pinv(m, 1e-14);
}

double position_error_bound(const Mat6& covariance) {
  return std::sqrt(std::max(0.0, covariance.topLeftCorner<3, 3>().trace()));
}

// Draws one trajectory and returns the data FIM at each of its `steps`
// states, redrawing whenever a state sits where the gradient is undefined.
std::vector<Mat6> trajectory_fims(const MeasurementModel& model, const MotionModel& motion,
                                  const Mat6& prior_factor, const State& prior_mean, int steps,
                                  Rng& rng, int* redraws) {
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    std::vector<Mat6> fims;
    fims.reserve(static_cast<std::size_t>(steps));
    State s = sample_gaussian(prior_mean, prior_factor, rng);
    try {
      for (int k = 1; k <= steps; ++k) {
        if (k > 1) s = propagate(motion, s, rng);
        fims.push_back(data_fim_state(model, position_of(s)));
      }
      return fims;
    } catch (const Error&) {
      ++*redraws;
    }
  }
  throw Error("could not draw a trajectory away from the model singularities");
}

}  // namespace

Mat6 prior_fim(const GaussianBelief& belief) {
  const Mat6 cov = floor_zero_variances(belief.covariance, kPriorVarianceFloor);
  Eigen::LLT<Mat6> llt(cov);
  if (llt.info() != Eigen::Success) throw Error("prior covariance is singular");
  return symmetrized(llt.solve(Mat6::Identity()));
}

RecursionStep recursion_step(const Mat6& j_prev, const MotionModel& motion,
                             const Mat6& expected_data_fim) {
  const Mat6 q = regularized_process_covariance(motion);
  Eigen::LLT<Mat6> q_llt(q);
  if (q_llt.info() != Eigen::Success) throw Error("process covariance is not invertible");
  const Mat6 q_inv = symmetrized(q_llt.solve(Mat6::Identity()));

  const Mat6& a = motion.A;
  const Mat6 d11 = a.transpose() * q_inv * a;
  const Mat6 d12 = -a.transpose() * q_inv;
  const Mat6 d21 = d12.transpose();
  const Mat6 d22 = q_inv + expected_data_fim;

  RecursionStep out;
  const Mat6 inner = symmetrized(j_prev + d11);
  Eigen::LLT<Mat6> inner_llt(inner);
  Mat6 solved;
  if (inner_llt.info() == Eigen::Success) {
    solved = inner_llt.solve(d12);
  } else {
    out.regularized = true;
    solved = symmetric_pinv(inner, 1e-14) * d12;
  }
  out.information = symmetrized(d22 - d21 * solved);
  return out;
}

DataFimEstimate expected_data_fim_mc(const MeasurementModel& model, const MotionModel& motion,
                                     const GaussianBelief& prior, int k, int n_traj, Rng& rng) {
  if (n_traj < 1) throw Error("n_traj must be at least 1");
  if (k < 1) throw Error("time step index starts at 1");
  const Mat6 factor = psd_factor(prior.covariance);
  DataFimEstimate out;
  for (int i = 0; i < n_traj; ++i) {
    Rng traj_rng = rng.split();
    const auto fims = trajectory_fims(model, motion, factor, prior.mean, k, traj_rng, &out.resampled);
    out.mean += fims.back();
  }
  out.mean /= static_cast<double>(n_traj);
  return out;
}

PcrlbTrace run_pcrlb(const GaussianBelief& prior, const MotionModel& motion,
                     const std::vector<Mat6>& expected_data_fims) {
  PcrlbTrace trace;
  regularized_process_covariance(motion, &trace.process_noise_regularized);
  Mat6 information = prior_fim(prior);
  for (std::size_t i = 0; i < expected_data_fims.size(); ++i) {
    PcrlbStep step;
    step.k = static_cast<int>(i) + 1;
    if (i == 0) {
      information = symmetrized(information + expected_data_fims[i]);
    } else {
      const RecursionStep r = recursion_step(information, motion, expected_data_fims[i]);
      information = r.information;
      step.regularized = r.regularized;
    }
    bool fallback = false;
    step.information = information;
    step.covariance = spd_inverse(information, &fallback);
    step.regularized = step.regularized || fallback;
    step.peb = position_error_bound(step.covariance);
    trace.steps.push_back(step);
  }
  return trace;
}

PcrlbTrace run_pcrlb(const PcrlbSetup& setup) {
  if (setup.steps < 1) throw Error("bound needs at least one step");
  if (setup.n_traj < 1) throw Error("n_traj must be at least 1");
  const Mat6 factor = psd_factor(setup.prior.covariance);
  std::vector<Mat6> mean_fims(static_cast<std::size_t>(setup.steps), Mat6::Zero());
  int redraws = 0;
  for (int i = 0; i < setup.n_traj; ++i) {
    Rng rng(derive_seed(setup.seed, static_cast<std::uint64_t>(i)));
    const auto fims = trajectory_fims(setup.model, setup.motion, factor, setup.prior.mean,
                                      setup.steps, rng, &redraws);
    for (std::size_t k = 0; k < fims.size(); ++k) mean_fims[k] += fims[k];
  }
  for (auto& m : mean_fims) m /= static_cast<double>(setup.n_traj);
  PcrlbTrace trace = run_pcrlb(setup.prior, setup.motion, mean_fims);
  trace.resampled_trajectories = redraws;
  return trace;
}

}  // namespace nftrack
