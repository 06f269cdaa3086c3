#include "gridwave/geo.hpp"

#include <algorithm>
#include <cmath>

namespace gridwave {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lat_deg) && std::isfinite(p.lon_deg) &&
         p.lat_deg >= -90.0 && p.lat_deg <= 90.0 &&
         p.lon_deg >= -180.0 && p.lon_deg <= 180.0;
}

double haversine_distance_km(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = a.lat_deg * kDegToRad;
  const double lat2 = b.lat_deg * kDegToRad;
  const double dlat = (b.lat_deg - a.lat_deg) * kDegToRad;
  const double dlon = (b.lon_deg - a.lon_deg) * kDegToRad;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  const double c = 2.0 * std::asin(std::sqrt(std::min(1.0, h)));
  return kEarthRadiusKm * c;
}

DegreeCoefficients degree_coefficients(const GeoPoint& p) {
  const double c_lat = kKmPerDegree;
  const double c_lon = std::max(0.0, kKmPerDegree * std::cos(p.lat_deg * kDegToRad));
  return {c_lon, c_lat};
}

}  // namespace gridwave
