// Simulation scenario: array, noise, motion, prior, trackers.
#pragma once

#include "nftrack/gaussian.hpp"
#include "nftrack/geometry.hpp"
#include "nftrack/mle.hpp"
#include "nftrack/motion.hpp"
#include "nftrack/observation.hpp"
#include "nftrack/pcrlb.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nftrack {

struct ArraySpec {
  enum class Kind { kRectangular, kCircular };
  Kind kind = Kind::kRectangular;
  int n_y = 20;
  int n_z = 20;
  /// Element spacing; 0 means λ/2.
  double spacing = 0.0;
  int n = 0;
  double diameter = 0.0;
  Vec3 reference = Vec3(0.0, 0.0, 1.0);

  ArrayGeometry build(double lambda) const;
};

enum class TrackerKind { kEkf, kMle, kPfPrior, kPfLikelihood, kPfLinopt };

std::string tracker_name(TrackerKind kind);
/// Throws Error for unknown names.
TrackerKind parse_tracker(const std::string& name);
bool is_particle_filter(TrackerKind kind);

struct Scenario {
  ArraySpec array;
  double lambda = 0.01;
  /// Truth phase noise (rad). Trackers assume sigma * (1 + gamma_m).
  double sigma = deg_to_rad(20.0);
  double gamma_m = 0.0;
  /// Tracker acceleration variances are gamma_t times the truth ones.
  double gamma_t = 1.0;
  double tau = 1.0;
  Vec3 accel_variance = Vec3(0.03 * 0.03, 0.03 * 0.03, 0.0);
  State initial_state = (State() << 2.5, -9.1, 1.5, 0.01, 0.97, 0.0).finished();
  /// Σ₀; when absent, diag(0.5², 0.5², 0.01², v₀²/100).
  std::optional<Mat6> prior_covariance;
  int steps = 20;
  std::vector<TrackerKind> trackers = {TrackerKind::kEkf, TrackerKind::kPfPrior};
  int particles = 1000;
  int runs = 100;
  std::uint64_t seed = 1;
  /// Polyline traversed at speed |v₀| instead of the motion model.
  std::vector<Vec3> waypoints;
  MleOptions mle;
  /// Half widths of the standalone MLE search box (m).
  Vec3 mle_half_width = Vec3(3.0, 3.0, 0.1);
  double pinv_tolerance = 1e-10;
  bool wrap_linopt_residual = false;
  /// Σ_s of the likelihood proposal; Σ₀ when absent.
  std::optional<Mat6> spread_covariance;
  /// Trajectories for the expected data FIM of the bound.
  int bound_trajectories = 200;

  void validate() const;

  double tracker_sigma() const { return sigma * (1.0 + gamma_m); }
  MotionModel truth_motion() const;
  MotionModel tracker_motion() const;
  MeasurementModel truth_measurement() const;
  MeasurementModel tracker_measurement() const;
  Mat6 prior_cov() const;
  Mat6 spread() const;
};

/// K states: s₀ followed by K-1 draws of the truth motion model, or the
/// waypoint polyline sampled every τ|v₀| of arc length.
std::vector<State> generate_truth(const Scenario& scenario, std::uint64_t seed);

/// Bound setup for the tracker's own models with prior N(s₀, Σ₀).
PcrlbSetup bound_setup(const Scenario& scenario);

}  // namespace nftrack
