// Multistart maximum-likelihood position fix from a single phase snapshot.
#pragma once

#include "nftrack/observation.hpp"
#include "nftrack/random.hpp"
#include "nftrack/types.hpp"

namespace nftrack {

struct SearchBox {
  Vec3 lower = Vec3::Zero();
  Vec3 upper = Vec3::Zero();

  static SearchBox centered(const Vec3& center, const Vec3& half_width) {
    return {center - half_width, center + half_width};
  }
  bool valid() const { return (lower.array() <= upper.array()).all(); }
  Vec3 clamp(const Vec3& p) const { return p.cwiseMax(lower).cwiseMin(upper); }
};

struct MleOptions {
  int starts = 32;
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;
};

struct MleResult {
  /// Position estimate with velocity set to zero.
  State estimate = State::Zero();
  /// ½ Σ r_n² at the estimate (wrapped residuals).
  double cost = 0.0;
  bool converged = false;
  /// Every start hit a point where the model is undefined.
  bool failed = false;
};

/// Maximizes the wrapped-residual likelihood over the box.
///
/// Starts are uniform in the box. Each start runs damped Gauss-Newton
/// (Levenberg-Marquardt) on ½ Σ r_n², keeping iterates inside the box, and
/// stops when the gradient norm falls below the tolerance, when the step
/// stalls, or after max_iterations. The best start wins.
MleResult mle(const MeasurementModel& model, const PhaseVector& z, const SearchBox& box,
              const MleOptions& options, Rng& rng);

}  // namespace nftrack
