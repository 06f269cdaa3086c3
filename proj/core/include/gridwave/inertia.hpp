#pragma once

#include <numbers>

#include "gridwave/field.hpp"

namespace gridwave {

/// Continuum-model electrical parameters, per unit. distance_base_km maps
/// measured km into per-unit distance before the speed-inertia inversion.
struct ContinuumParams {
  double omega_pu = 1.0;
  double v_mag_pu = 1.0;
  double theta_rad = std::numbers::pi / 2.0;  // line impedance angle
  double z_mag_pu = 1.0;
  double distance_base_km = 1.0;

  /// Throws ValidationError unless all parameters are positive and
  /// theta_rad lies in (0, pi).
  void validate() const;
};

/// Default slowness floor below which speed is masked rather than reported
/// (the arrival-time surface is flat at its source and extrema, where the
/// implied speed diverges).
inline constexpr double kDefaultSlownessFloorSPerKm = 1e-9;

/// Per-degree gradient of the field: central differences at interior
/// nodes, one-sided first-order differences at edges. Requires nx, ny >= 3.
VectorField gradient_field(const ScalarField& tdoa);

/// Propagation speed per node: 1 / sqrt((dlon/c_lon)^2 + (dlat/c_lat)^2)
/// with the degree coefficients evaluated at each node's latitude. Nodes
/// whose slowness falls below eps_grad (or is not finite) are masked.
ScalarField speed_field(const VectorField& grad,
                        double eps_grad_s_per_km = kDefaultSlownessFloorSPerKm);

/// h = omega * V^2 * sin(theta) / (2 |z| v_pu^2), v_pu = v_kms / distance_base_km.
double inertia_from_speed_kms(double speed_km_s, const ContinuumParams& params);

/// Pointwise inversion of the speed field; masked nodes stay masked.
ScalarField inertia_from_speed(const ScalarField& speed, const ContinuumParams& params);

}  // namespace gridwave
