// Common vector and matrix aliases for the near-field tracking library.
#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>

namespace nftrack {

inline constexpr int kStateDim = 6;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
/// Source state [x, y, z, vx, vy, vz]; metres and metres per step.
using State = Eigen::Matrix<double, kStateDim, 1>;
using Mat6 = Eigen::Matrix<double, kStateDim, kStateDim>;
/// One wrapped differential phase per antenna (rad).
using PhaseVector = Eigen::VectorXd;

inline Vec3 position_of(const State& s) { return s.head<3>(); }
inline Vec3 velocity_of(const State& s) { return s.tail<3>(); }

inline State make_state(const Vec3& p, const Vec3& v) {
  State s;
  s << p, v;
  return s;
}

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Thrown for violated preconditions on library inputs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nftrack
