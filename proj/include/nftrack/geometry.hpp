// Array layouts, spherical coordinates, and the extra-distance model.
#pragma once

#include "nftrack/types.hpp"

#include <cstddef>
#include <vector>

namespace nftrack {

/// Range, elevation (from +z) and azimuth (from +x in the xy-plane).
struct SphericalCoords {
  double d = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Position of one antenna and its polar description relative to the
/// array reference location.
struct Antenna {
  Vec3 position = Vec3::Zero();
  double d_n0 = 0.0;
  double theta_n0 = 0.0;
  double phi_n0 = 0.0;
};

/// Where the reference location sits relative to the elements.
enum class ReferenceConvention {
  kFirstAntenna,  ///< antenna 0 is the reference, d_00 = 0
  kRingCenter,    ///< reference is the centre of a ring, no element on it
};

class ArrayGeometry {
 public:
  /// Generic array: polar tuples are derived from the positions and the
  /// diameter is the maximum pairwise distance. Antenna 0 must coincide
  /// with the reference.
  ArrayGeometry(const Vec3& reference, const std::vector<Vec3>& positions);

  /// Array with explicit polar tuples; positions are rebuilt from them.
  ArrayGeometry(const Vec3& reference, std::vector<Antenna> antennas, double diameter,
                ReferenceConvention convention);

  const Vec3& reference() const { return reference_; }
  std::size_t size() const { return antennas_.size(); }
  const Antenna& antenna(std::size_t n) const { return antennas_.at(n); }
  const std::vector<Antenna>& antennas() const { return antennas_; }
  double diameter() const { return diameter_; }
  ReferenceConvention convention() const { return convention_; }

  // Cached trigonometry of the antenna directions, laid out per antenna.
  // Row n: sin(theta_n0), cos(theta_n0), cos(phi_n0), sin(phi_n0).
  const Eigen::Matrix<double, Eigen::Dynamic, 4>& direction_table() const { return trig_; }
  const Eigen::VectorXd& distances() const { return dist_; }

 private:
  void build_cache();

  Vec3 reference_;
  std::vector<Antenna> antennas_;
  double diameter_ = 0.0;
  ReferenceConvention convention_ = ReferenceConvention::kFirstAntenna;
  Eigen::Matrix<double, Eigen::Dynamic, 4> trig_;
  Eigen::VectorXd dist_;
};

/// Planar N_y x N_z grid on the YZ-plane with antenna 0 at the reference.
ArrayGeometry make_rectangular_array(int n_y, int n_z, double spacing, const Vec3& reference);

/// Ring of N elements on the YZ-plane centred on the reference.
ArrayGeometry make_circular_array(int n, double diameter, const Vec3& reference);

/// Throws when p coincides with the reference. phi is 0 on the z-axis.
SphericalCoords to_spherical(const Vec3& p, const Vec3& reference);
Vec3 from_spherical(const SphericalCoords& s, const Vec3& reference);

/// Cosine of the angle between the antenna direction and the source
/// direction, both seen from the reference.
double geometric_term(double theta_n0, double phi_n0, const SphericalCoords& source);
double geometric_term(const Antenna& antenna, const SphericalCoords& source);

/// ||q_n - p|| - ||q_0 - p|| evaluated through the curvature term f_n.
double extra_distance(const ArrayGeometry& geom, std::size_t n, const Vec3& p);

/// Extra distance for every antenna at once.
Eigen::VectorXd extra_distances(const ArrayGeometry& geom, const Vec3& p);

struct FieldBoundaries {
  double fresnel_lower = 0.0;  ///< 0.62 sqrt(D^3 / lambda)
  double fraunhofer = 0.0;     ///< 2 D^2 / lambda
};

FieldBoundaries field_boundaries(double diameter, double lambda);

inline double fraunhofer_distance(double diameter, double lambda) {
  return field_boundaries(diameter, lambda).fraunhofer;
}

}  // namespace nftrack
