#include "gridwave/interp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "gridwave/errors.hpp"

namespace gridwave {

namespace {

constexpr double kMergeToleranceDeg = 1e-9;
constexpr double kMaxConditionNumber = 1e12;

struct MergedPoint {
  double lon;
  double lat;
  double value_sum;
  int count;
};

double distance_deg(double lon_a, double lat_a, double lon_b, double lat_b) {
  const double dx = lon_a - lon_b;
  const double dy = lat_a - lat_b;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

SplineModel fit_biharmonic_spline(std::span<const GeoPoint> points,
                                  std::span<const double> values, double lambda) {
  if (points.empty()) throw ValidationError("spline fit requires at least one point");
  if (points.size() != values.size()) {
    throw ValidationError("spline fit: point and value counts differ");
  }
  if (lambda < 0.0) throw ValidationError("spline regularization must be >= 0");

  // Merge near-coincident points (co-located stations) by value averaging.
  std::vector<MergedPoint> merged;
  merged.reserve(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!std::isfinite(values[k])) {
      throw ValidationError("spline fit: non-finite value at point " + std::to_string(k));
    }
    bool absorbed = false;
    for (auto& m : merged) {
      if (distance_deg(points[k].lon_deg, points[k].lat_deg, m.lon, m.lat) <=
          kMergeToleranceDeg) {
        m.value_sum += values[k];
        m.count += 1;
        absorbed = true;
        break;
      }
    }
    if (!absorbed) {
      merged.push_back({points[k].lon_deg, points[k].lat_deg, values[k], 1});
    }
  }

  const int n = static_cast<int>(merged.size());
  Eigen::VectorXd v(n);
  Eigen::VectorXd lons(n);
  Eigen::VectorXd lats(n);
  for (int i = 0; i < n; ++i) {
    lons(i) = merged[i].lon;
    lats(i) = merged[i].lat;
    v(i) = merged[i].value_sum / merged[i].count;
  }

  // Affine trend about the centroid; minimal-norm least squares so that
  // degenerate configurations (single point, collinear points) land on the
  // flattest trend that fits.
  const double lon0 = lons.mean();
  const double lat0 = lats.mean();
  Eigen::MatrixXd design(n, 3);
  design.col(0).setOnes();
  design.col(1) = lons.array() - lon0;
  design.col(2) = lats.array() - lat0;
  const Eigen::Vector3d centered =
      design.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(v);
  const Eigen::VectorXd residuals = v - design * centered;

  SplineModel model;
  model.regularization = lambda;
  model.trend = {centered(0) - centered(1) * lon0 - centered(2) * lat0, centered(1),
                 centered(2)};
  model.centers.resize(n);
  for (int i = 0; i < n; ++i) {
    model.centers[i] = GeoPoint{lats(i), lons(i)};
  }

  Eigen::MatrixXd green(n, n);
  for (int i = 0; i < n; ++i) {
    green(i, i) = lambda;
    for (int j = i + 1; j < n; ++j) {
      const double g = biharmonic_green(distance_deg(lons(i), lats(i), lons(j), lats(j)));
      green(i, j) = g;
      green(j, i) = g;
    }
  }

  if (lambda == 0.0 && n > 1) {
    const Eigen::VectorXd sv = green.bdcSvd().singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || sv(0) / smin > kMaxConditionNumber) {
      throw NumericalError(
          "biharmonic system is singular or ill-conditioned (condition number above "
          "1e12); refit with regularization lambda > 0");
    }
  }

  Eigen::VectorXd weights;
  if (n == 1) {
    // A single merged point is fully absorbed by the trend.
    weights = Eigen::VectorXd::Zero(1);
  } else {
    weights = green.partialPivLu().solve(residuals);
  }
  model.weights.assign(weights.data(), weights.data() + n);
  return model;
}

double evaluate_spline(const SplineModel& model, const GeoPoint& at) {
  double value = model.trend[0] + model.trend[1] * at.lon_deg + model.trend[2] * at.lat_deg;
  for (std::size_t j = 0; j < model.centers.size(); ++j) {
    const double r =
        distance_deg(at.lon_deg, at.lat_deg, model.centers[j].lon_deg, model.centers[j].lat_deg);
    value += model.weights[j] * biharmonic_green(r);
  }
  return value;
}

ScalarField evaluate_on_grid(const SplineModel& model, const GridSpec& grid) {
  grid.validate();
  ScalarField field(grid);
  for (int i = 0; i < grid.ny; ++i) {
    for (int j = 0; j < grid.nx; ++j) {
      field.at(i, j) = evaluate_spline(model, grid.node(i, j));
    }
  }
  return field;
}

}  // namespace gridwave
