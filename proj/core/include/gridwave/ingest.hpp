#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gridwave/geo.hpp"

namespace gridwave {

struct StationMeta {
  std::string station_id;
  double lat_deg{};
  double lon_deg{};

  GeoPoint location() const { return {lat_deg, lon_deg}; }
};

/// One station's uniformly sampled frequency time series. All traces of a
/// dataset share a common time epoch; timestamps are relative seconds.
struct PmuTrace {
  StationMeta station;
  double t0_s{};
  double dt_s{};
  std::vector<double> freq_hz;

  double time_at(std::size_t k) const { return t0_s + static_cast<double>(k) * dt_s; }
  double duration_s() const { return static_cast<double>(freq_hz.size() - 1) * dt_s; }
};

/// Parses station metadata CSV with header `station_id,lat_deg,lon_deg`.
/// Throws ParseError naming the offending line on malformed rows,
/// out-of-range coordinates or duplicate ids. Row order is preserved.
std::vector<StationMeta> parse_station_metadata(std::istream& in);

/// Parses a trace CSV with header `t_s,freq_hz`. Rows must be strictly
/// increasing in time with uniform spacing (tolerance 1e-6 * dt).
PmuTrace parse_trace_csv(std::istream& in, const StationMeta& station);

void write_station_metadata(std::ostream& out, std::span<const StationMeta> stations);
void write_trace_csv(std::ostream& out, const PmuTrace& trace);

}  // namespace gridwave
