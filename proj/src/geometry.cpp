#include "nftrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace nftrack {

ArrayGeometry::ArrayGeometry(const Vec3& reference, const std::vector<Vec3>& positions)
    : reference_(reference) {
  if (positions.empty()) throw Error("array needs at least one antenna");
  const double scale = std::max(1.0, reference.norm());
  if ((positions.front() - reference).norm() > 1e-12 * scale) {
    throw Error("antenna 0 must coincide with the reference location");
  }
  antennas_.reserve(positions.size());
  for (std::size_t n = 0; n < positions.size(); ++n) {
    Antenna a;
    a.position = n == 0 ? reference : positions[n];
    const double d = (a.position - reference).norm();
    if (d > 0.0) {
      const SphericalCoords s = to_spherical(a.position, reference);
      a.d_n0 = s.d;
      a.theta_n0 = s.theta;
      a.phi_n0 = s.phi;
    }
    antennas_.push_back(a);
  }
  double diameter = 0.0;
  for (std::size_t i = 0; i < antennas_.size(); ++i) {
    for (std::size_t j = i + 1; j < antennas_.size(); ++j) {
      diameter = std::max(diameter, (antennas_[i].position - antennas_[j].position).norm());
    }
  }
  diameter_ = diameter;
  build_cache();
}

ArrayGeometry::ArrayGeometry(const Vec3& reference, std::vector<Antenna> antennas,
                             double diameter, ReferenceConvention convention)
    : reference_(reference),
      antennas_(std::move(antennas)),
      diameter_(diameter),
      convention_(convention) {
  if (antennas_.empty()) throw Error("array needs at least one antenna");
  if (!(diameter_ >= 0.0)) throw Error("array diameter must be non-negative");
  build_cache();
}

void ArrayGeometry::build_cache() {
  const auto n = static_cast<Eigen::Index>(antennas_.size());
  trig_.resize(n, 4);
  dist_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Antenna& a = antennas_[static_cast<std::size_t>(i)];
    trig_(i, 0) = std::sin(a.theta_n0);
    trig_(i, 1) = std::cos(a.theta_n0);
    trig_(i, 2) = std::cos(a.phi_n0);
    trig_(i, 3) = std::sin(a.phi_n0);
    dist_(i) = a.d_n0;
  }
}

ArrayGeometry make_rectangular_array(int n_y, int n_z, double spacing, const Vec3& reference) {
  if (n_y < 1 || n_z < 1) throw Error("rectangular array needs N_y >= 1 and N_z >= 1");
  if (!(spacing > 0.0)) throw Error("antenna spacing must be positive");
  std::vector<Antenna> antennas;
  antennas.reserve(static_cast<std::size_t>(n_y) * static_cast<std::size_t>(n_z));
  for (int iy = 0; iy < n_y; ++iy) {
    for (int iz = 0; iz < n_z; ++iz) {
      Antenna a;
      a.position = reference + spacing * Vec3(0.0, iy, iz);
      const double n_tilde = std::hypot(static_cast<double>(iy), static_cast<double>(iz));
      if (n_tilde > 0.0) {
        a.d_n0 = spacing * n_tilde;
        a.theta_n0 = std::acos(iz / n_tilde);
        a.phi_n0 = kPi / 2.0;
      }
      antennas.push_back(a);
    }
  }
  const double span_y = n_y - 1.0;
  const double span_z = n_z - 1.0;
  const double diameter = spacing * std::sqrt(span_y * span_y + span_z * span_z);
  return ArrayGeometry(reference, std::move(antennas), diameter,
                       ReferenceConvention::kFirstAntenna);
}

ArrayGeometry make_circular_array(int n, double diameter, const Vec3& reference) {
  if (n < 1) throw Error("circular array needs N >= 1");
  if (!(diameter > 0.0)) throw Error("circular array diameter must be positive");
  const double radius = diameter / 2.0;
  std::vector<Antenna> antennas;
  antennas.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Antenna a;
    a.d_n0 = radius;
    a.theta_n0 = kTwoPi * i / n;
    a.phi_n0 = kPi / 2.0;
    a.position = reference + radius * Vec3(0.0, std::sin(a.theta_n0), std::cos(a.theta_n0));
    antennas.push_back(a);
  }
  return ArrayGeometry(reference, std::move(antennas), diameter,
                       ReferenceConvention::kRingCenter);
}

SphericalCoords to_spherical(const Vec3& p, const Vec3& reference) {
  const Vec3 r = p - reference;
  const double d = r.norm();
  if (!(d > 0.0)) throw Error("spherical angles undefined at the reference location");
  SphericalCoords s;
  s.d = d;
  s.theta = std::acos(std::clamp(r.z() / d, -1.0, 1.0));
  s.phi = std::atan2(r.y(), r.x());
  if (s.phi <= -kPi) s.phi = kPi;
  return s;
}

Vec3 from_spherical(const SphericalCoords& s, const Vec3& reference) {
  const double st = std::sin(s.theta);
  return reference + s.d * Vec3(std::cos(s.phi) * st, std::sin(s.phi) * st, std::cos(s.theta));
}

double geometric_term(double theta_n0, double phi_n0, const SphericalCoords& source) {
  return std::sin(theta_n0) * std::sin(source.theta) * std::cos(phi_n0 - source.phi) +
         std::cos(theta_n0) * std::cos(source.theta);
}

double geometric_term(const Antenna& antenna, const SphericalCoords& source) {
  return geometric_term(antenna.theta_n0, antenna.phi_n0, source);
}

namespace {

// d * (sqrt(f) - 1) with f - 1 = a (a - 2 g), a = d_n0 / d, in a form
// that keeps relative precision when a is small.
double extra_distance_from_terms(double d, double d_n0, double g) {
  const double a = d_n0 / d;
  const double f_minus_1 = a * (a - 2.0 * g);
  const double f = std::max(0.0, 1.0 + f_minus_1);
  return d * f_minus_1 / (std::sqrt(f) + 1.0);
}

}  // namespace

double extra_distance(const ArrayGeometry& geom, std::size_t n, const Vec3& p) {
  const SphericalCoords s = to_spherical(p, geom.reference());
  const Antenna& a = geom.antenna(n);
  if (a.d_n0 == 0.0) return 0.0;
  return extra_distance_from_terms(s.d, a.d_n0, geometric_term(a, s));
}

Eigen::VectorXd extra_distances(const ArrayGeometry& geom, const Vec3& p) {
  const SphericalCoords s = to_spherical(p, geom.reference());
  const double st = std::sin(s.theta);
  const double ct = std::cos(s.theta);
  const double cp = std::cos(s.phi);
  const double sp = std::sin(s.phi);
  const auto& trig = geom.direction_table();
  const auto& dist = geom.distances();
  Eigen::VectorXd out(dist.size());
  for (Eigen::Index n = 0; n < dist.size(); ++n) {
    if (dist(n) == 0.0) {
      out(n) = 0.0;
      continue;
    }
    // cos(phi_n0 - phi) expanded so the per-antenna trigonometry is cached.
    const double g = trig(n, 0) * st * (trig(n, 2) * cp + trig(n, 3) * sp) + trig(n, 1) * ct;
    out(n) = extra_distance_from_terms(s.d, dist(n), g);
  }
  return out;
}

FieldBoundaries field_boundaries(double diameter, double lambda) {
  if (!(diameter > 0.0) || !(lambda > 0.0)) {
    throw Error("field boundaries need positive diameter and wavelength");
  }
  return {0.62 * std::sqrt(diameter * diameter * diameter / lambda),
          2.0 * diameter * diameter / lambda};
}

}  // namespace nftrack
