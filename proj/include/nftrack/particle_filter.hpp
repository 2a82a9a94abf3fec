// Sequential importance resampling with three proposal densities.
#pragma once

#include "nftrack/gaussian.hpp"
#include "nftrack/mle.hpp"
#include "nftrack/motion.hpp"
#include "nftrack/observation_model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nftrack {

struct ParticleSet {
  std::vector<State> states;
  Eigen::VectorXd weights;

  std::size_t size() const { return states.size(); }
  /// Σ w_m s_m
  State weighted_mean() const;
};

/// M draws from the belief with uniform weights.
ParticleSet sample_particles(const GaussianBelief& belief, int count, Rng& rng);

enum class IsKind { kPrior, kLikelihood, kLinearizedOptimal };

std::string to_string(IsKind kind);

struct IsConfig {
  IsKind kind = IsKind::kPrior;
  /// Σ_s for the likelihood proposal.
  Mat6 spread_covariance = Mat6::Identity();
  /// Relative cutoff on singular values of H.
  double pinv_tolerance = 1e-10;
  /// Wrap z - h(s̄) to (-π, π] in the linearized proposal mean.
  bool wrap_linopt_residual = false;
};

/// Proposed states with log p(s | s_prev) - log π(s) per particle.
struct ProposalDraw {
  std::vector<State> states;
  Eigen::VectorXd log_correction;
  /// Linearized proposal saw fewer identified directions than H has columns.
  bool rank_deficient = false;
};

/// log N(s; A s_prev, Q) with zero noise variances regularized.
class TransitionDensity {
 public:
  explicit TransitionDensity(const MotionModel& motion);
  double log_density(const State& s, const State& s_prev) const;

 private:
  Mat6 a_;
  GaussianDensity density_;
};

ProposalDraw is_sample_prior(const ParticleSet& ps, const MotionModel& motion, Rng& rng);

/// Every particle drawn from N(ml_estimate, Σ_s); zero variances of Σ_s are
/// floored at 1e-12 so the proposal has a density.
ProposalDraw is_sample_likelihood(const ParticleSet& ps, const State& ml_estimate,
                                  const MotionModel& motion, const Mat6& spread, Rng& rng);

/// Local-linearization proposal. For each particle with s̄ = A s_m and
/// H = ∂h/∂s at s̄:
///   R̃ = H† R H†ᵀ,  Σ = (Q⁻¹ + R̃⁺)⁻¹,
///   μ = Σ [Q⁻¹ s̄ + Hᵀ R⁻¹ (r + H s̄)],  r = z - h(s̄).
/// With wrap_residual, r is the model residual instead. The plain
/// difference lets phase wraps throw μ far off when the likelihood is
/// sharp, which is what drives weight collapse at low noise.
ProposalDraw is_sample_linopt(const ParticleSet& ps, const Eigen::VectorXd& z,
                              const ObservationModel& obs, const MotionModel& motion,
                              double pinv_tolerance, bool wrap_residual, Rng& rng);

/// Moments of the linearized proposal for one particle (exposed for tests).
struct LinoptMoments {
  State mean;
  Mat6 covariance;
  bool rank_deficient = false;
};
LinoptMoments linopt_moments(const State& s_prev, const Eigen::VectorXd& z,
                             const ObservationModel& obs, const MotionModel& motion,
                             double pinv_tolerance, bool wrap_residual = false);

/// M i.i.d. categorical draws by inverse CDF; output weights 1/M.
ParticleSet resample_multinomial(const ParticleSet& ps, Rng& rng);

/// Normalizes log weights in place into probabilities. Non-finite entries
/// get weight 0. Returns true when the unnormalized sum is below 1e-300 and
/// the weights were reset to 1/M.
bool normalize_log_weights(const Eigen::VectorXd& log_weights, Eigen::VectorXd& weights);

struct PfFlags {
  bool weight_reset = false;
  bool mle_failed = false;
  bool rank_deficient = false;
};

struct PfStepResult {
  /// Resampled set, uniform weights.
  ParticleSet particles;
  State estimate = State::Zero();
  PfFlags flags;
};

/// Returns an ML state for the likelihood proposal, or nothing on failure.
/// Receives the measurement and the states the proposal will move.
using MlProvider =
    std::function<std::optional<State>(const Eigen::VectorXd& z, const ParticleSet& previous)>;

/// Weighting, estimate and resampling on a proposed set.
PfStepResult pf_update(ParticleSet proposed, const Eigen::VectorXd& log_correction,
                       const Eigen::VectorXd& z, const ObservationModel& obs, Rng& rng);

/// One cycle of the filter: proposal from `ps` (the resampled set of the
/// previous step), weighting by the likelihood and the proposal correction,
/// normalization or reset, estimate Σ w_m s_m, multinomial resampling.
PfStepResult pf_step(const ParticleSet& ps, const Eigen::VectorXd& z, const ObservationModel& obs,
                     const MotionModel& motion, const IsConfig& config, Rng& rng,
                     const MlProvider& ml = {});

}  // namespace nftrack
