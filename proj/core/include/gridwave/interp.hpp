#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "gridwave/field.hpp"
#include "gridwave/geo.hpp"

namespace gridwave {

/// Point-load solution of the 2-D biharmonic equation:
/// g(r) = r^2 (ln r - 1), with g(0) = 0. C1 at the origin.
inline double biharmonic_green(double r) {
  return r > 0.0 ? r * r * (std::log(r) - 1.0) : 0.0;
}

/// Fitted biharmonic spline: an affine trend plus weighted Green's
/// functions centered on the (deduplicated) data points. Distances are
/// Euclidean in degree coordinates.
struct SplineModel {
  std::vector<GeoPoint> centers;
  std::vector<double> weights;
  /// value = trend[0] + trend[1] * lon_deg + trend[2] * lat_deg
  std::array<double, 3> trend{};
  double regularization{};
};

/// Fits the spline through scattered (lon, lat, value) samples.
///
/// Points closer than 1e-9 deg are merged, averaging their values. The
/// affine trend is a minimal-norm least-squares fit; the weights solve
/// (G + lambda*I) alpha = residuals. With lambda = 0 the model reproduces
/// every input value; a condition number estimate above 1e12 raises
/// NumericalError suggesting lambda > 0.
SplineModel fit_biharmonic_spline(std::span<const GeoPoint> points,
                                  std::span<const double> values,
                                  double lambda = 0.0);

double evaluate_spline(const SplineModel& model, const GeoPoint& at);

/// Evaluates the spline at every node of the grid.
ScalarField evaluate_on_grid(const SplineModel& model, const GridSpec& grid);

}  // namespace gridwave
