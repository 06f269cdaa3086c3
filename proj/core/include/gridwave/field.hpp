#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "gridwave/geo.hpp"

namespace gridwave {

/// Regular lon/lat evaluation lattice. Row index i runs over latitude
/// (i = 0 at lat_min), column index j over longitude.
struct GridSpec {
  double lon_min{};
  double lon_max{};
  double lat_min{};
  double lat_max{};
  int nx{};
  int ny{};

  double dlon() const { return (lon_max - lon_min) / (nx - 1); }
  double dlat() const { return (lat_max - lat_min) / (ny - 1); }
  double lon_at(int j) const { return lon_min + j * dlon(); }
  double lat_at(int i) const { return lat_min + i * dlat(); }
  GeoPoint node(int i, int j) const { return {lat_at(i), lon_at(j)}; }
  std::size_t node_count() const { return static_cast<std::size_t>(nx) * ny; }

  /// Throws ValidationError unless lon_min < lon_max, lat_min < lat_max,
  /// nx >= 2 and ny >= 2.
  void validate() const;
};

/// Marker for masked (invalid) field nodes.
inline constexpr double kInvalidValue = std::numeric_limits<double>::quiet_NaN();

/// ny x nx grid of values in row-major order (row = latitude index).
/// Nodes are either finite or masked with kInvalidValue.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(const GridSpec& grid, double fill = kInvalidValue);

  const GridSpec& grid() const { return grid_; }
  double at(int i, int j) const { return values_[index(i, j)]; }
  double& at(int i, int j) { return values_[index(i, j)]; }
  bool is_valid(int i, int j) const { return std::isfinite(at(i, j)); }
  std::size_t masked_count() const;

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * grid_.nx + j; }

  GridSpec grid_{};
  std::vector<double> values_;
};

/// Per-degree gradient of a scalar field, decomposed along the two axes.
struct VectorField {
  GridSpec grid{};
  std::vector<double> d_dlon;  // s/deg longitude, row-major
  std::vector<double> d_dlat;  // s/deg latitude

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * grid.nx + j; }
};

}  // namespace gridwave
