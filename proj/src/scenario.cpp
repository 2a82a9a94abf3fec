#include "nftrack/scenario.hpp"

#include <cmath>

namespace nftrack {

ArrayGeometry ArraySpec::build(double lambda) const {
  if (kind == Kind::kRectangular) {
    const double d = spacing > 0.0 ? spacing : 0.5 * lambda;
    return make_rectangular_array(n_y, n_z, d, reference);
  }
  return make_circular_array(n, diameter, reference);
}

std::string tracker_name(TrackerKind kind) {
  switch (kind) {
    case TrackerKind::kEkf: return "ekf";
    case TrackerKind::kMle: return "mle";
    case TrackerKind::kPfPrior: return "pf_prior";
    case TrackerKind::kPfLikelihood: return "pf_likelihood";
    case TrackerKind::kPfLinopt: return "pf_linopt";
  }
  return "unknown";
}

TrackerKind parse_tracker(const std::string& name) {
  for (auto k : {TrackerKind::kEkf, TrackerKind::kMle, TrackerKind::kPfPrior,
                 TrackerKind::kPfLikelihood, TrackerKind::kPfLinopt}) {
    if (tracker_name(k) == name) return k;
  }
  throw Error("unknown tracker '" + name +
              "' (expected ekf, mle, pf_prior, pf_likelihood or pf_linopt)");
}

bool is_particle_filter(TrackerKind kind) {
  return kind == TrackerKind::kPfPrior || kind == TrackerKind::kPfLikelihood ||
         kind == TrackerKind::kPfLinopt;
}

void Scenario::validate() const {
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  if (!(sigma > 0.0)) throw Error("sigma must be positive");
  if (!(gamma_m >= 0.0)) throw Error("gamma_m must be nonnegative");
  if (!(gamma_t >= 0.0)) throw Error("gamma_t must be nonnegative");
  if (!(tau > 0.0)) throw Error("tau must be positive");
  if ((accel_variance.array() < 0.0).any()) throw Error("acceleration variances must be >= 0");
  if (steps < 1) throw Error("steps must be at least 1");
  if (runs < 1) throw Error("runs must be at least 1");
  if (particles < 1) throw Error("particles must be at least 1");
  if (trackers.empty()) throw Error("at least one tracker is required");
  if (mle.starts < 1) throw Error("mle starts must be at least 1");
  if (mle.max_iterations < 1) throw Error("mle max_iter must be at least 1");
  if ((mle_half_width.array() < 0.0).any()) throw Error("mle box half widths must be >= 0");
  if (bound_trajectories < 1) throw Error("bound trajectories must be at least 1");
  if (!waypoints.empty()) {
    if (waypoints.size() < 2) throw Error("waypoints need at least two points");
    if (!(velocity_of(initial_state).norm() > 0.0)) {
      throw Error("waypoint trajectories need a nonzero initial speed");
    }
  }
  if (array.kind == ArraySpec::Kind::kRectangular) {
    if (array.n_y < 1 || array.n_z < 1) throw Error("array dimensions must be >= 1");
  } else if (array.n < 1 || !(array.diameter > 0.0)) {
    throw Error("circular array needs n >= 1 and a positive diameter");
  }
  const Mat6 p = prior_cov();
  Eigen::SelfAdjointEigenSolver<Mat6> eig(symmetrized(p));
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, p.norm())) {
    throw Error("prior covariance is not positive semidefinite");
  }
}

MotionModel Scenario::truth_motion() const {
  return make_ncv(tau, accel_variance(0), accel_variance(1), accel_variance(2));
}

MotionModel Scenario::tracker_motion() const { return scaled_ncv(truth_motion(), gamma_t); }

MeasurementModel Scenario::truth_measurement() const {
  return MeasurementModel(array.build(lambda), lambda, sigma);
}

MeasurementModel Scenario::tracker_measurement() const {
  return MeasurementModel(array.build(lambda), lambda, tracker_sigma());
}

Mat6 Scenario::prior_cov() const {
  if (prior_covariance) return *prior_covariance;
  Mat6 p = Mat6::Zero();
  p(0, 0) = 0.25;
  p(1, 1) = 0.25;
  p(2, 2) = 1e-4;
  for (int i = 0; i < 3; ++i) p(3 + i, 3 + i) = initial_state(3 + i) * initial_state(3 + i) / 100.0;
  return p;
}

Mat6 Scenario::spread() const { return spread_covariance ? *spread_covariance : prior_cov(); }

namespace {

std::vector<State> follow_waypoints(const std::vector<Vec3>& points, double speed, double tau,
                                    int steps) {
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    double remaining = speed * tau * k;
    std::size_t seg = 0;
    while (seg + 1 < points.size()) {
      const double len = (points[seg + 1] - points[seg]).norm();
      if (remaining <= len || seg + 2 == points.size()) break;
      remaining -= len;
      ++seg;
    }
    const Vec3 a = points[seg];
    const Vec3 b = points[seg + 1];
    const double len = (b - a).norm();
    const Vec3 dir = len > 0.0 ? Vec3((b - a) / len) : Vec3::Zero();
    const bool past_end = remaining > len;
    const Vec3 p = past_end ? b : Vec3(a + remaining * dir);
    out.push_back(make_state(p, past_end ? Vec3::Zero() : Vec3(speed * dir)));
  }
  return out;
}

}  // namespace

std::vector<State> generate_truth(const Scenario& scenario, std::uint64_t seed) {
  if (!scenario.waypoints.empty()) {
    return follow_waypoints(scenario.waypoints, velocity_of(scenario.initial_state).norm(),
                            scenario.tau, scenario.steps);
  }
  const MotionModel motion = scenario.truth_motion();
  Rng rng(seed);
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(scenario.steps));
  out.push_back(scenario.initial_state);
  for (int k = 1; k < scenario.steps; ++k) out.push_back(propagate(motion, out.back(), rng));
  return out;
}

PcrlbSetup bound_setup(const Scenario& scenario) {
  PcrlbSetup setup{scenario.tracker_measurement(), scenario.tracker_motion(),
                   GaussianBelief{scenario.initial_state, scenario.prior_cov()}};
  setup.steps = scenario.steps;
  setup.n_traj = scenario.bound_trajectories;
  setup.seed = scenario.seed;
  return setup;
}

}  // namespace nftrack
