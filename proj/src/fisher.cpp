#include "nftrack/fisher.hpp"

#include <cmath>

namespace nftrack {

namespace {

// Source-side trigonometry and the Cartesian gradients of d, θ, φ.
struct SourceFrame {
  SphericalCoords s;
  double st, ct, sp, cp;
  Vec3 grad_d, grad_theta, grad_phi;
};

SourceFrame make_frame(const Vec3& p, const Vec3& reference) {
  SourceFrame fr;
  fr.s = to_spherical(p, reference);
  fr.st = std::sin(fr.s.theta);
  fr.ct = std::cos(fr.s.theta);
  fr.sp = std::sin(fr.s.phi);
  fr.cp = std::cos(fr.s.phi);
  if (fr.st < 1e-12) throw Error("gradient undefined on the polar axis of the array");
  const double d = fr.s.d;
  fr.grad_d = (p - reference) / d;
  fr.grad_theta = Vec3(fr.cp * fr.ct / d, fr.sp * fr.ct / d, -fr.st / d);
  fr.grad_phi = Vec3(-fr.sp / (d * fr.st), fr.cp / (d * fr.st), 0.0);
  return fr;
}

// ∇Δd for one antenna given its cached direction terms.
Vec3 antenna_gradient(const SourceFrame& fr, double d_n0, double sin_tn, double cos_tn,
                      double cos_pn, double sin_pn, double* extra) {
  if (d_n0 == 0.0) {
    if (extra != nullptr) *extra = 0.0;
    return Vec3::Zero();
  }
  const double d = fr.s.d;
  // cos(φ_n0 - φ) and sin(φ_n0 - φ) by the difference identities.
  const double cos_dphi = cos_pn * fr.cp + sin_pn * fr.sp;
  const double sin_dphi = sin_pn * fr.cp - cos_pn * fr.sp;
  const double g = sin_tn * fr.st * cos_dphi + cos_tn * fr.ct;

  const double a = d_n0 / d;
  const double f_minus_1 = a * (a - 2.0 * g);
  const double f = 1.0 + f_minus_1;
  if (!(f > 1e-24)) throw Error("gradient undefined at an antenna location");
  const double sqrt_f = std::sqrt(f);

  const Vec3 grad_g = sin_tn * (cos_dphi * fr.ct * fr.grad_theta + fr.st * sin_dphi * fr.grad_phi) -
                      cos_tn * fr.st * fr.grad_theta;
  const Vec3 grad_f =
      -(2.0 * d_n0 / d) * (d_n0 * fr.grad_d / (d * d) + grad_g - g * fr.grad_d / d);
  const double sqrt_f_minus_1 = f_minus_1 / (sqrt_f + 1.0);
  if (extra != nullptr) *extra = d * sqrt_f_minus_1;
  return fr.grad_d * sqrt_f_minus_1 + d * grad_f / (2.0 * sqrt_f);
}

}  // namespace

Vec3 grad_extra_distance(const ArrayGeometry& geom, std::size_t n, const Vec3& p) {
  const SourceFrame fr = make_frame(p, geom.reference());
  const Antenna& a = geom.antenna(n);
  return antenna_gradient(fr, a.d_n0, std::sin(a.theta_n0), std::cos(a.theta_n0),
                          std::cos(a.phi_n0), std::sin(a.phi_n0), nullptr);
}

State grad_extra_distance_state(const ArrayGeometry& geom, std::size_t n, const Vec3& p) {
  return make_state(grad_extra_distance(geom, n, p), Vec3::Zero());
}

Eigen::Matrix<double, Eigen::Dynamic, 3> extra_distance_gradients(const ArrayGeometry& geom,
                                                                   const Vec3& p,
                                                                   Eigen::VectorXd* extra) {
  const SourceFrame fr = make_frame(p, geom.reference());
  const auto& trig = geom.direction_table();
  const auto& dist = geom.distances();
  const Eigen::Index n_ant = dist.size();
  Eigen::Matrix<double, Eigen::Dynamic, 3> grads(n_ant, 3);
  if (extra != nullptr) extra->resize(n_ant);
  for (Eigen::Index n = 0; n < n_ant; ++n) {
    double dd = 0.0;
    grads.row(n) = antenna_gradient(fr, dist(n), trig(n, 0), trig(n, 1), trig(n, 2),
                                    trig(n, 3), &dd)
                       .transpose();
    if (extra != nullptr) (*extra)(n) = dd;
  }
  return grads;
}

Mat6 data_fim_state(const MeasurementModel& model, const Vec3& p) {
  if (!(model.sigma_eta > 0.0)) throw Error("data FIM needs sigma_eta > 0");
  const auto grads = extra_distance_gradients(model.geometry, p);
  Mat3 acc = Mat3::Zero();
  for (Eigen::Index n = 0; n < grads.rows(); ++n) {
    const Vec3 g = grads.row(n).transpose();
    acc.noalias() += g * g.transpose();
  }
  const double k = model.wavenumber() / model.sigma_eta;
  Mat6 fim = Mat6::Zero();
  fim.topLeftCorner<3, 3>() = k * k * acc;
  return fim;
}

PolarFim data_fim_polar(const MeasurementModel& model, const SphericalCoords& source) {
  if (!(model.sigma_eta > 0.0)) throw Error("data FIM needs sigma_eta > 0");
  if (!(source.d > 0.0)) throw Error("data FIM needs a positive source range");
  const double st = std::sin(source.theta);
  const double ct = std::cos(source.theta);
  PolarFim sum;
  for (const Antenna& ant : model.geometry.antennas()) {
    if (ant.d_n0 == 0.0) continue;
    const double a = ant.d_n0 / source.d;
    const double g = geometric_term(ant, source);
    const double f = 1.0 + a * (a - 2.0 * g);
    if (!(f > 1e-24)) throw Error("data FIM undefined at an antenna location");
    const double sqrt_f = std::sqrt(f);
    // 1 - g a - sqrt(f) rewritten as -a²(1 - g²) / (1 - g a + sqrt(f)).
    const double range_num = a * a * (1.0 - g * g) / (1.0 - g * a + sqrt_f);
    sum.range += range_num * range_num / f;

    const double dphi = ant.phi_n0 - source.phi;
    const double dg_dtheta = ct * std::sin(ant.theta_n0) * std::cos(dphi) - st * std::cos(ant.theta_n0);
    const double dg_dphi = std::sin(dphi) * std::sin(ant.theta_n0) * st;
    const double w = ant.d_n0 * ant.d_n0 / f;
    sum.elevation += w * dg_dtheta * dg_dtheta;
    sum.azimuth += w * dg_dphi * dg_dphi;
  }
  const double k2 = std::pow(model.wavenumber() / model.sigma_eta, 2);
  return {k2 * sum.range, k2 * sum.elevation, k2 * sum.azimuth};
}

double data_fim_polar(const MeasurementModel& model, const SphericalCoords& source,
                      PolarParameter which) {
  const PolarFim all = data_fim_polar(model, source);
  switch (which) {
    case PolarParameter::kRange: return all.range;
    case PolarParameter::kElevation: return all.elevation;
    case PolarParameter::kAzimuth: return all.azimuth;
  }
  return 0.0;
}

namespace {

// (2 + x - 2 sqrt(1 + x)) / (1 + x) via (sqrt(1 + x) - 1)^2.
double range_shape(double x) {
  const double root_minus_1 = x / (std::sqrt(1.0 + x) + 1.0);
  return root_minus_1 * root_minus_1 / (1.0 + x);
}

void check_fim_inputs(double lambda, double sigma_eta) {
  if (!(lambda > 0.0)) throw Error("wavelength must be positive");
  if (!(sigma_eta > 0.0)) throw Error("FIM needs sigma_eta > 0");
}

}  // namespace

PolarFim fim_circular(int n, double diameter, double lambda, double sigma_eta, double d) {
  check_fim_inputs(lambda, sigma_eta);
  if (n < 1 || !(diameter > 0.0) || !(d > 0.0)) throw Error("invalid circular FIM inputs");
  const double x = diameter * diameter / (4.0 * d * d);
  const double base = kPi * kPi / (lambda * lambda * sigma_eta * sigma_eta);
  PolarFim out;
  out.range = 4.0 * n * base * range_shape(x);
  out.elevation = n * base / 2.0 * diameter * diameter / (1.0 + x);
  out.azimuth = out.elevation;
  return out;
}

PolarFim fim_rectangular(int n_y, int n_z, double lambda, double sigma_eta, double d) {
  check_fim_inputs(lambda, sigma_eta);
  if (n_y < 1 || n_z < 1 || !(d > 0.0)) throw Error("invalid rectangular FIM inputs");
  double range = 0.0;
  double elevation = 0.0;
  double azimuth = 0.0;
  const double four_d2 = 4.0 * d * d;
  for (int iy = 0; iy < n_y; ++iy) {
    for (int iz = 0; iz < n_z; ++iz) {
      const double n2 = static_cast<double>(iy) * iy + static_cast<double>(iz) * iz;
      const double denom = n2 * lambda * lambda + four_d2;
      range += range_shape(lambda * lambda * n2 / four_d2);
      // ñ² cos²θ_n0 = n_z² and ñ² sin²θ_n0 = n_y².
      elevation += static_cast<double>(iz) * iz * d * d / denom;
      azimuth += static_cast<double>(iy) * iy * d * d / denom;
    }
  }
  const double s2 = sigma_eta * sigma_eta;
  return {4.0 * kPi * kPi / (lambda * lambda * s2) * range, 4.0 * kPi * kPi / s2 * elevation,
          4.0 * kPi * kPi / s2 * azimuth};
}

double rectangular_nhop_diameter(int n_y, int n_z, double lambda) {
  return lambda / 2.0 * std::hypot(static_cast<double>(n_y), static_cast<double>(n_z));
}

PolarFim fim_rectangular_at_fresnel(int n_y, int n_z, double lambda, double sigma_eta) {
  check_fim_inputs(lambda, sigma_eta);
  if (n_y < 1 || n_z < 1) throw Error("invalid rectangular FIM inputs");
  const double big_n2 = static_cast<double>(n_y) * n_y + static_cast<double>(n_z) * n_z;
  double range = 0.0;
  double elevation = 0.0;
  double azimuth = 0.0;
  for (int iy = 0; iy < n_y; ++iy) {
    for (int iz = 0; iz < n_z; ++iz) {
      const double n2 = static_cast<double>(iy) * iy + static_cast<double>(iz) * iz;
      const double x = n2 / (big_n2 * big_n2);  // (ñ / Ñ²)²
      range += range_shape(x);
      elevation += static_cast<double>(iz) * iz / (1.0 + x);
      azimuth += static_cast<double>(iy) * iy / (1.0 + x);
    }
  }
  const double s2 = sigma_eta * sigma_eta;
  return {4.0 * kPi * kPi / (lambda * lambda * s2) * range, kPi * kPi / s2 * elevation,
          kPi * kPi / s2 * azimuth};
}

}  // namespace nftrack
