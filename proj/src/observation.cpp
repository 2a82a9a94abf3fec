#include "nftrack/observation.hpp"

#include <cmath>
#include <utility>

namespace nftrack {

MeasurementModel::MeasurementModel(ArrayGeometry geometry_in, double lambda_in,
                                   double sigma_in)
    : geometry(std::move(geometry_in)), lambda(lambda_in), sigma_eta(sigma_in) {
  if (!(lambda > 0.0)) throw Error("wavelength must be positive");
  if (!(sigma_eta >= 0.0)) throw Error("phase noise standard deviation must be >= 0");
}

double wrap_signed(double x) { return std::fmod(x, kTwoPi); }

double wrap_to_pi(double x) {
  double r = std::remainder(x, kTwoPi);  // [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

Eigen::VectorXd unwrapped_phase(const MeasurementModel& model, const Vec3& p) {
  return model.wavenumber() * extra_distances(model.geometry, p);
}

PhaseVector observe_clean(const MeasurementModel& model, const Vec3& p) {
  return unwrapped_phase(model, p).unaryExpr([](double x) { return wrap_signed(x); });
}

PhaseVector observe_noisy(const MeasurementModel& model, const Vec3& p, Rng& rng) {
  Eigen::VectorXd phase = unwrapped_phase(model, p);
  for (Eigen::Index n = 0; n < phase.size(); ++n) {
    phase(n) = wrap_signed(phase(n) + model.sigma_eta * rng.normal());
  }
  return phase;
}

Eigen::VectorXd phase_residual(const PhaseVector& z, const PhaseVector& h) {
  if (z.size() != h.size()) throw Error("phase vectors differ in length");
  return (z - h).unaryExpr([](double x) { return wrap_to_pi(x); });
}

double log_likelihood(const MeasurementModel& model, const PhaseVector& z, const Vec3& p) {
  if (!(model.sigma_eta > 0.0)) throw Error("likelihood needs sigma_eta > 0");
  const Eigen::VectorXd r = phase_residual(z, observe_clean(model, p));
  const double var = model.sigma_eta * model.sigma_eta;
  const double log_norm = std::log(std::sqrt(kTwoPi) * model.sigma_eta);
  return -r.squaredNorm() / (2.0 * var) - static_cast<double>(r.size()) * log_norm;
}

}  // namespace nftrack
