#include "nftrack/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nftrack {

State ParticleSet::weighted_mean() const {
  State mean = State::Zero();
  for (std::size_t m = 0; m < states.size(); ++m) {
    mean += weights(static_cast<Eigen::Index>(m)) * states[m];
  }
  return mean;
}

ParticleSet sample_particles(const GaussianBelief& belief, int count, Rng& rng) {
  if (count < 1) throw Error("particle count must be at least 1");
  const Mat6 factor = psd_factor(symmetrized(belief.covariance));
  ParticleSet ps;
  ps.states.reserve(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) ps.states.push_back(sample_gaussian(belief.mean, factor, rng));
  ps.weights = Eigen::VectorXd::Constant(count, 1.0 / count);
  return ps;
}

std::string to_string(IsKind kind) {
  switch (kind) {
    case IsKind::kPrior: return "prior";
    case IsKind::kLikelihood: return "likelihood";
    case IsKind::kLinearizedOptimal: return "linearized_optimal";
  }
  return "unknown";
}

TransitionDensity::TransitionDensity(const MotionModel& motion)
    : a_(motion.A), density_(regularized_process_covariance(motion)) {}

double TransitionDensity::log_density(const State& s, const State& s_prev) const {
  return density_.log_density(s, a_ * s_prev);
}

ProposalDraw is_sample_prior(const ParticleSet& ps, const MotionModel& motion, Rng& rng) {
  ProposalDraw out;
  out.states.reserve(ps.size());
  for (const State& s : ps.states) out.states.push_back(propagate(motion, s, rng));
  out.log_correction = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ps.size()));
  return out;
}

ProposalDraw is_sample_likelihood(const ParticleSet& ps, const State& ml_estimate,
                                  const MotionModel& motion, const Mat6& spread, Rng& rng) {
  const Mat6 cov = floor_zero_variances(symmetrized(spread), 1e-12);
  const Mat6 factor = psd_factor(cov);
  const GaussianDensity proposal(cov);
  const TransitionDensity transition(motion);

  ProposalDraw out;
  out.states.reserve(ps.size());
  out.log_correction.resize(static_cast<Eigen::Index>(ps.size()));
  for (std::size_t m = 0; m < ps.size(); ++m) {
    const State s = sample_gaussian(ml_estimate, factor, rng);
    out.log_correction(static_cast<Eigen::Index>(m)) =
        transition.log_density(s, ps.states[m]) - proposal.log_density(s, ml_estimate);
    out.states.push_back(s);
  }
  return out;
}

namespace {

struct LinoptContext {
  Mat6 q_inverse;
  TransitionDensity transition;
};

LinoptContext make_linopt_context(const MotionModel& motion) {
  const Mat6 q = regularized_process_covariance(motion);
  Eigen::LLT<Mat6> llt(q);
  if (llt.info() != Eigen::Success) throw Error("process covariance is not invertible");
  return {llt.solve(Mat6::Identity()), TransitionDensity(motion)};
}

LinoptMoments moments_with(const LinoptContext& ctx, const State& s_prev,
                           const Eigen::VectorXd& z, const ObservationModel& obs,
                           const MotionModel& motion, double tol, bool wrap_residual) {
  const State pred = motion.A * s_prev;
  Eigen::MatrixXd h;
  const Eigen::VectorXd zhat = obs.predict_with_jacobian(pred, h);
  // As printed the mean uses the plain difference z - h(s̄); wrapping it is optional.
  const Eigen::VectorXd r = wrap_residual ? obs.residual(z, zhat) : Eigen::VectorXd(z - zhat);
  const double var = obs.noise_std() * obs.noise_std();

  // Singular values of H below tol * max are dropped, i.e. eigenvalues of
  // HᵀH below tol² * max.
  const Mat6 hth = h.transpose() * h;
  int rank = 0;
  const Mat6 r_tilde = var * symmetric_pinv(hth, tol * tol, &rank);
  const Mat6 r_tilde_inv = symmetric_pinv(r_tilde, tol * tol);

  int informative_columns = 0;
  for (Eigen::Index c = 0; c < h.cols(); ++c) {
    if (h.col(c).cwiseAbs().maxCoeff() > 0.0) ++informative_columns;
  }

  LinoptMoments out;
  const Mat6 precision = symmetrized(ctx.q_inverse + r_tilde_inv);
  Eigen::LLT<Mat6> llt(precision);
  if (llt.info() != Eigen::Success) throw Error("linearized proposal precision is singular");
  out.covariance = symmetrized(llt.solve(Mat6::Identity()));
  const State info = ctx.q_inverse * pred + (h.transpose() * r + hth * pred) / var;
  out.mean = out.covariance * info;
  out.rank_deficient = rank < informative_columns;
  return out;
}

}  // namespace

LinoptMoments linopt_moments(const State& s_prev, const Eigen::VectorXd& z,
                             const ObservationModel& obs, const MotionModel& motion,
                             double pinv_tolerance, bool wrap_residual) {
  return moments_with(make_linopt_context(motion), s_prev, z, obs, motion, pinv_tolerance,
                      wrap_residual);
}

ProposalDraw is_sample_linopt(const ParticleSet& ps, const Eigen::VectorXd& z,
                              const ObservationModel& obs, const MotionModel& motion,
                              double pinv_tolerance, bool wrap_residual, Rng& rng) {
  const LinoptContext ctx = make_linopt_context(motion);
  ProposalDraw out;
  out.states.reserve(ps.size());
  out.log_correction.resize(static_cast<Eigen::Index>(ps.size()));
  for (std::size_t m = 0; m < ps.size(); ++m) {
    LinoptMoments mom;
    try {
      mom = moments_with(ctx, ps.states[m], z, obs, motion, pinv_tolerance, wrap_residual);
    } catch (const Error&) {
      // Jacobian undefined at the prediction: draw from the transition.
      out.states.push_back(propagate(motion, ps.states[m], rng));
      out.log_correction(static_cast<Eigen::Index>(m)) = 0.0;
      out.rank_deficient = true;
      continue;
    }
    out.rank_deficient = out.rank_deficient || mom.rank_deficient;
    const GaussianDensity proposal(mom.covariance);
    const State s = sample_gaussian(mom.mean, psd_factor(mom.covariance), rng);
    out.log_correction(static_cast<Eigen::Index>(m)) =
        ctx.transition.log_density(s, ps.states[m]) - proposal.log_density(s, mom.mean);
    out.states.push_back(s);
  }
  return out;
}

ParticleSet resample_multinomial(const ParticleSet& ps, Rng& rng) {
  const auto m = static_cast<Eigen::Index>(ps.size());
  if (m == 0) throw Error("cannot resample an empty particle set");
  std::vector<double> cdf(static_cast<std::size_t>(m));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    acc += ps.weights(i);
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  ParticleSet out;
  out.states.reserve(ps.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    out.states.push_back(ps.states[static_cast<std::size_t>(it - cdf.begin())]);
  }
  out.weights = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  return out;
}

bool normalize_log_weights(const Eigen::VectorXd& log_weights, Eigen::VectorXd& weights) {
  const Eigen::Index m = log_weights.size();
  double peak = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::isfinite(log_weights(i))) peak = std::max(peak, log_weights(i));
  }
  weights.resize(m);
  if (!std::isfinite(peak)) {
    weights.setConstant(1.0 / static_cast<double>(m));
    return true;
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    weights(i) = std::isfinite(log_weights(i)) ? std::exp(log_weights(i) - peak) : 0.0;
    sum += weights(i);
  }
  const double log_total = peak + std::log(sum);
  if (log_total < std::log(1e-300)) {
    weights.setConstant(1.0 / static_cast<double>(m));
    return true;
  }
  weights /= sum;
  return false;
}

PfStepResult pf_update(ParticleSet proposed, const Eigen::VectorXd& log_correction,
                       const Eigen::VectorXd& z, const ObservationModel& obs, Rng& rng) {
  const auto m = static_cast<Eigen::Index>(proposed.size());
  if (m == 0) throw Error("particle set is empty");
  Eigen::VectorXd log_w(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const State& s = proposed.states[static_cast<std::size_t>(i)];
    double ll = -std::numeric_limits<double>::infinity();
    try {
      ll = obs.log_likelihood_kernel(z, s);
    } catch (const Error&) {
    }
    const double prev = proposed.weights.size() == m ? proposed.weights(i) : 1.0 / m;
    log_w(i) = std::log(prev) + log_correction(i) + ll;
    if (std::isnan(log_w(i))) log_w(i) = -std::numeric_limits<double>::infinity();
  }

  PfStepResult out;
  out.flags.weight_reset = normalize_log_weights(log_w, proposed.weights);
  out.estimate = proposed.weighted_mean();
  out.particles = resample_multinomial(proposed, rng);
  return out;
}

PfStepResult pf_step(const ParticleSet& ps, const Eigen::VectorXd& z, const ObservationModel& obs,
                     const MotionModel& motion, const IsConfig& config, Rng& rng,
                     const MlProvider& ml) {
  ProposalDraw draw;
  PfFlags flags;
  switch (config.kind) {
    case IsKind::kPrior:
      draw = is_sample_prior(ps, motion, rng);
      break;
    case IsKind::kLikelihood: {
      std::optional<State> estimate;
      if (ml) estimate = ml(z, ps);
      if (estimate) {
        draw = is_sample_likelihood(ps, *estimate, motion, config.spread_covariance, rng);
      } else {
        flags.mle_failed = true;
        draw = is_sample_prior(ps, motion, rng);
      }
      break;
    }
    case IsKind::kLinearizedOptimal:
      draw = is_sample_linopt(ps, z, obs, motion, config.pinv_tolerance,
                              config.wrap_linopt_residual, rng);
      flags.rank_deficient = draw.rank_deficient;
      break;
  }

  ParticleSet proposed;
  proposed.states = std::move(draw.states);
  proposed.weights = ps.weights;
  PfStepResult out = pf_update(std::move(proposed), draw.log_correction, z, obs, rng);
  out.flags.mle_failed = flags.mle_failed;
  out.flags.rank_deficient = flags.rank_deficient;
  return out;
}

}  // namespace nftrack
