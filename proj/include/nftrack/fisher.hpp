// Gradients of the extra-distance model and closed-form data Fisher information.
//
// All Fisher quantities use the unwrapped phase 2pi/lambda * Δd_n, so phase
// wrapping never enters them.
#pragma once

#include "nftrack/geometry.hpp"
#include "nftrack/observation.hpp"
#include "nftrack/types.hpp"

#include <cstddef>

namespace nftrack {

/// ∇_p Δd_n through the chain d, θ, φ -> g_n -> f_n -> Δd_n.
/// Throws on the polar axis (sin θ = 0) and when p sits on antenna n.
Vec3 grad_extra_distance(const ArrayGeometry& geom, std::size_t n, const Vec3& p);

/// Same gradient over the 6-dim state; velocity entries are zero.
State grad_extra_distance_state(const ArrayGeometry& geom, std::size_t n, const Vec3& p);

/// Row n holds ∇_p Δd_n. When `extra` is given it receives Δd_n as well.
Eigen::Matrix<double, Eigen::Dynamic, 3> extra_distance_gradients(
    const ArrayGeometry& geom, const Vec3& p, Eigen::VectorXd* extra = nullptr);

/// Data FIM of the 6-dim state at position p:
/// (1/σ²)(2π/λ)² Σ_n ∇Δd_n ∇Δd_nᵀ, zero in the velocity rows and columns.
Mat6 data_fim_state(const MeasurementModel& model, const Vec3& p);

enum class PolarParameter { kRange, kElevation, kAzimuth };

struct PolarFim {
  double range = 0.0;
  double elevation = 0.0;
  double azimuth = 0.0;
};

/// Scalar FIM of one spherical parameter with the other two known, summed
/// over the per-antenna squared derivatives of Δd_n.
double data_fim_polar(const MeasurementModel& model, const SphericalCoords& source,
                      PolarParameter which);
PolarFim data_fim_polar(const MeasurementModel& model, const SphericalCoords& source);

/// Ring of N elements with diameter D, source on the broadside axis.
/// Matches the general sum for N >= 3, where Σ cos²(2πn/N) = N/2.
PolarFim fim_circular(int n, double diameter, double lambda, double sigma_eta, double d);

/// λ/2-spaced N_y x N_z grid, source on the broadside axis through antenna 0.
PolarFim fim_rectangular(int n_y, int n_z, double lambda, double sigma_eta, double d);

/// fim_rectangular evaluated at d = 2D²/λ with D = (λ/2) sqrt(N_y² + N_z²).
/// Elevation and azimuth terms do not depend on λ; the range term does.
PolarFim fim_rectangular_at_fresnel(int n_y, int n_z, double lambda, double sigma_eta);

/// Diameter convention used by fim_rectangular_at_fresnel.
double rectangular_nhop_diameter(int n_y, int n_z, double lambda);

}  // namespace nftrack
