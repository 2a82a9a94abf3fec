#include "nftrack/mle.hpp"

#include "nftrack/fisher.hpp"

#include <cmath>
#include <limits>

namespace nftrack {

namespace {

struct Evaluation {
  Eigen::VectorXd residual;
  Eigen::Matrix<double, Eigen::Dynamic, 3> jac;
  double cost = 0.0;
};

bool evaluate(const MeasurementModel& model, const PhaseVector& z, const Vec3& p,
              Evaluation& out) {
  try {
    Eigen::VectorXd extra;
    out.jac = model.wavenumber() * extra_distance_gradients(model.geometry, p, &extra);
    out.residual.resize(extra.size());
    for (Eigen::Index n = 0; n < extra.size(); ++n) {
      out.residual(n) = wrap_to_pi(z(n) - wrap_signed(model.wavenumber() * extra(n)));
    }
    out.cost = 0.5 * out.residual.squaredNorm();
    return std::isfinite(out.cost);
  } catch (const Error&) {
    return false;
  }
}

struct LocalResult {
  Vec3 p;
  double cost;
  bool converged;
};

bool local_search(const MeasurementModel& model, const PhaseVector& z, const SearchBox& box,
                  const MleOptions& options, Vec3 p, LocalResult& result) {
  Evaluation cur;
  if (!evaluate(model, z, p, cur)) return false;
  Mat3 jtj = cur.jac.transpose() * cur.jac;
  Vec3 grad = cur.jac.transpose() * cur.residual;  // descent direction of the cost
  double damping = 1e-3 * std::max(jtj.diagonal().maxCoeff(), 1e-300);
  bool converged = false;

  Evaluation trial;
  for (int it = 0; it < options.max_iterations; ++it) {
    if (grad.norm() < options.gradient_tolerance) {
      converged = true;
      break;
    }
    Mat3 lhs = jtj;
    lhs.diagonal() += damping * (jtj.diagonal().array() + 1e-12).matrix();
    const Vec3 step = lhs.ldlt().solve(grad);
    const Vec3 next = box.clamp(p + step);
    if ((next - p).norm() <= 1e-14 * (1.0 + p.norm())) {
      converged = grad.norm() < std::sqrt(options.gradient_tolerance);
      break;
    }
    if (evaluate(model, z, next, trial) && trial.cost < cur.cost) {
      p = next;
      std::swap(cur, trial);
      jtj = cur.jac.transpose() * cur.jac;
      grad = cur.jac.transpose() * cur.residual;
      damping = std::max(damping / 3.0, 1e-15);
    } else {
      damping *= 4.0;
      if (damping > 1e16) break;
    }
  }
  result = {p, cur.cost, converged};
  return true;
}

}  // namespace

MleResult mle(const MeasurementModel& model, const PhaseVector& z, const SearchBox& box,
              const MleOptions& options, Rng& rng) {
  if (!box.valid()) throw Error("MLE search box is empty");
  if (options.starts < 1) throw Error("MLE needs at least one start");
  if (z.size() != model.size()) throw Error("measurement size does not match the model");

  MleResult out;
  out.failed = true;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < options.starts; ++s) {
    Vec3 start;
    for (int i = 0; i < 3; ++i) start(i) = rng.uniform(box.lower(i), box.upper(i));
    LocalResult local;
    if (!local_search(model, z, box, options, start, local)) continue;
    if (local.cost < best) {
      best = local.cost;
      out.estimate = make_state(local.p, Vec3::Zero());
      out.cost = local.cost;
      out.converged = local.converged;
      out.failed = false;
    }
  }
  return out;
}

}  // namespace nftrack
