// Differential-phase observation model and its Gaussian likelihood.
#pragma once

#include "nftrack/geometry.hpp"
#include "nftrack/random.hpp"
#include "nftrack/types.hpp"

namespace nftrack {

struct MeasurementModel {
  MeasurementModel(ArrayGeometry geometry, double lambda, double sigma_eta);

  ArrayGeometry geometry;
  double lambda;
  /// Phase noise standard deviation (rad); R = sigma_eta^2 I.
  double sigma_eta;

  Eigen::Index size() const { return static_cast<Eigen::Index>(geometry.size()); }
  double wavenumber() const { return kTwoPi / lambda; }
};

/// Remainder of x / 2pi carrying the sign of x, in (-2pi, 2pi).
double wrap_signed(double x);

/// Nearest representative of x modulo 2pi in (-pi, pi].
double wrap_to_pi(double x);

/// 2pi/lambda times the extra distance for every antenna, not wrapped.
Eigen::VectorXd unwrapped_phase(const MeasurementModel& model, const Vec3& p);

PhaseVector observe_clean(const MeasurementModel& model, const Vec3& p);

/// Gaussian noise is added to the unwrapped phase, then wrapped.
PhaseVector observe_noisy(const MeasurementModel& model, const Vec3& p, Rng& rng);

/// Per-element z - h wrapped to (-pi, pi].
Eigen::VectorXd phase_residual(const PhaseVector& z, const PhaseVector& h);

/// Log of N independent Gaussians in the wrapped residuals, including the
/// normalisation -N log(sqrt(2 pi) sigma).
double log_likelihood(const MeasurementModel& model, const PhaseVector& z, const Vec3& p);

}  // namespace nftrack
