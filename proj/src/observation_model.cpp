#include "nftrack/observation_model.hpp"

#include "nftrack/fisher.hpp"

namespace nftrack {

double ObservationModel::log_likelihood_kernel(const Eigen::VectorXd& z, const State& s) const {
  const double sigma = noise_std();
  return -residual(z, predict(s)).squaredNorm() / (2.0 * sigma * sigma);
}

Eigen::MatrixXd jacobian(const MeasurementModel& model, const Vec3& p) {
  const auto grads = extra_distance_gradients(model.geometry, p);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(grads.rows(), kStateDim);
  h.leftCols<3>() = model.wavenumber() * grads;
  return h;
}

Eigen::VectorXd PhaseObservation::predict(const State& s) const {
  return observe_clean(model_, position_of(s));
}

Eigen::MatrixXd PhaseObservation::jacobian(const State& s) const {
  return nftrack::jacobian(model_, position_of(s));
}

Eigen::VectorXd PhaseObservation::predict_with_jacobian(const State& s, Eigen::MatrixXd& h) const {
  Eigen::VectorXd extra;
  const auto grads = extra_distance_gradients(model_.geometry, position_of(s), &extra);
  h = Eigen::MatrixXd::Zero(grads.rows(), kStateDim);
  h.leftCols<3>() = model_.wavenumber() * grads;
  return (model_.wavenumber() * extra).unaryExpr([](double x) { return wrap_signed(x); });
}

Eigen::VectorXd PhaseObservation::residual(const Eigen::VectorXd& z,
                                           const Eigen::VectorXd& zhat) const {
  return phase_residual(z, zhat);
}

LinearObservation::LinearObservation(Eigen::MatrixXd h, double sigma)
    : h_(std::move(h)), sigma_(sigma) {
  if (h_.cols() != kStateDim) throw Error("linear observation matrix must have 6 columns");
  if (!(sigma_ > 0.0)) throw Error("observation noise must be positive");
}

}  // namespace nftrack
