#pragma once

#include <numbers>

namespace gridwave {

/// Mean spherical Earth radius.
inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle length of one degree of latitude (and of longitude at the
/// equator): pi * R / 180, about 111.195 km.
inline constexpr double kKmPerDegree = std::numbers::pi * kEarthRadiusKm / 180.0;

struct GeoPoint {
  double lat_deg{};
  double lon_deg{};
};

/// km per degree of longitude / latitude at a given location. Converts
/// per-degree gradients of an arrival-time surface into per-km gradients.
struct DegreeCoefficients {
  double c_lon_km_per_deg{};
  double c_lat_km_per_deg{};
};

bool is_valid(const GeoPoint& p);

/// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_distance_km(const GeoPoint& a, const GeoPoint& b);

/// c_lat = pi*R/180, c_lon = c_lat * cos(lat). c_lon is zero at the poles.
DegreeCoefficients degree_coefficients(const GeoPoint& p);

}  // namespace gridwave
