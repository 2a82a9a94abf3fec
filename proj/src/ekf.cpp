#include "nftrack/ekf.hpp"

namespace nftrack {

EkfStepResult ekf_step(const GaussianBelief& predicted, const Eigen::VectorXd& z,
                       const ObservationModel& obs, const MotionModel& motion) {
  if (z.size() != obs.dimension()) throw Error("measurement size does not match the model");
  EkfStepResult out;

  Eigen::MatrixXd h;
  const Eigen::VectorXd zhat = obs.predict_with_jacobian(predicted.mean, h);
  const Eigen::VectorXd innovation = obs.residual(z, zhat);

  const Mat6 l = psd_factor(symmetrized(predicted.covariance));
  const Eigen::MatrixXd b = h * l;
  const double var = obs.noise_std() * obs.noise_std();
  Mat6 m = b.transpose() * b;
  m.diagonal().array() += var;

  Eigen::LLT<Mat6> llt(m);
  double effective_var = var;
  if (llt.info() != Eigen::Success) {
    const double ridge = 1e-12 * std::max(1.0, m.trace());
    m.diagonal().array() += ridge;
    effective_var += ridge;
    llt.compute(m);
    out.regularized = true;
    if (llt.info() != Eigen::Success) throw Error("EKF innovation covariance is singular");
  }

  const State correction = l * llt.solve(b.transpose() * innovation);
  out.posterior.mean = predicted.mean + correction;
  out.posterior.covariance = symmetrized(effective_var * l * llt.solve(l.transpose()));

  out.predicted.mean = motion.A * out.posterior.mean;
  out.predicted.covariance =
      symmetrized(motion.A * out.posterior.covariance * motion.A.transpose() + motion.Q);
  return out;
}

}  // namespace nftrack
