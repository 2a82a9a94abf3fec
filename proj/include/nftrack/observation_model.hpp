// Observation interface shared by the trackers.
//
// Every model has isotropic noise R = σ² I. The phase model wraps its
// residuals; the linear model is the surrogate used to check the trackers
// against exact Kalman results.
#pragma once

#include "nftrack/observation.hpp"
#include "nftrack/types.hpp"

#include <utility>

namespace nftrack {

class ObservationModel {
 public:
  virtual ~ObservationModel() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual double noise_std() const = 0;
  virtual Eigen::VectorXd predict(const State& s) const = 0;
  /// N x 6 Jacobian of predict at s.
  virtual Eigen::MatrixXd jacobian(const State& s) const = 0;
  /// Prediction and Jacobian from a single pass; override when cheaper.
  virtual Eigen::VectorXd predict_with_jacobian(const State& s, Eigen::MatrixXd& h) const {
    h = jacobian(s);
    return predict(s);
  }
  virtual Eigen::VectorXd residual(const Eigen::VectorXd& z, const Eigen::VectorXd& zhat) const = 0;

  /// -||residual||² / (2σ²): the likelihood without its constant.
  double log_likelihood_kernel(const Eigen::VectorXd& z, const State& s) const;
};

/// N x 6 Jacobian of the phase model, (2π/λ)[∇_p Δd_n, 0, 0, 0] per row.
Eigen::MatrixXd jacobian(const MeasurementModel& model, const Vec3& p);

class PhaseObservation final : public ObservationModel {
 public:
  explicit PhaseObservation(MeasurementModel model) : model_(std::move(model)) {}

  const MeasurementModel& model() const { return model_; }

  Eigen::Index dimension() const override { return model_.size(); }
  double noise_std() const override { return model_.sigma_eta; }
  Eigen::VectorXd predict(const State& s) const override;
  Eigen::MatrixXd jacobian(const State& s) const override;
  Eigen::VectorXd predict_with_jacobian(const State& s, Eigen::MatrixXd& h) const override;
  Eigen::VectorXd residual(const Eigen::VectorXd& z, const Eigen::VectorXd& zhat) const override;

 private:
  MeasurementModel model_;
};

/// z = H s + η with η ~ N(0, σ² I), no wrapping.
class LinearObservation final : public ObservationModel {
 public:
  LinearObservation(Eigen::MatrixXd h, double sigma);

  Eigen::Index dimension() const override { return h_.rows(); }
  double noise_std() const override { return sigma_; }
  Eigen::VectorXd predict(const State& s) const override { return h_ * s; }
  Eigen::MatrixXd jacobian(const State&) const override { return h_; }
  Eigen::VectorXd residual(const Eigen::VectorXd& z, const Eigen::VectorXd& zhat) const override {
    return z - zhat;
  }

 private:
  Eigen::MatrixXd h_;
  double sigma_;
};

}  // namespace nftrack
