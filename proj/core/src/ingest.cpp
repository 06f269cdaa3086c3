#include "gridwave/ingest.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>

#include "gridwave/errors.hpp"
#include "gridwave/io.hpp"
#include "text_util.hpp"

namespace gridwave {

namespace {

using detail::is_blank;
using detail::parse_double;
using detail::split_csv;
using detail::strip_cr;

[[noreturn]] void fail(const std::string& what, int line) {
  throw ParseError(what + ", line " + std::to_string(line));
}

}  // namespace

std::vector<StationMeta> parse_station_metadata(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "station_id,lat_deg,lon_deg") {
    throw ParseError("expected header 'station_id,lat_deg,lon_deg', line 1");
  }
  std::vector<StationMeta> stations;
  std::unordered_set<std::string> seen;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = strip_cr(line);
    if (is_blank(row)) continue;
    const auto fields = split_csv(row);
    if (fields.size() != 3) fail("expected 3 columns", line_no);
    StationMeta s;
    s.station_id = std::string(detail::trim(fields[0]));
    if (s.station_id.empty()) fail("empty station_id", line_no);
    const auto lat = parse_double(fields[1]);
    const auto lon = parse_double(fields[2]);
    if (!lat) fail("non-numeric latitude", line_no);
    if (!lon) fail("non-numeric longitude", line_no);
    if (*lat < -90.0 || *lat > 90.0) fail("latitude out of range", line_no);
    if (*lon < -180.0 || *lon > 180.0) fail("longitude out of range", line_no);
    if (!seen.insert(s.station_id).second) {
      fail("duplicate station_id '" + s.station_id + "'", line_no);
    }
    s.lat_deg = *lat;
    s.lon_deg = *lon;
    stations.push_back(std::move(s));
  }
  return stations;
}

PmuTrace parse_trace_csv(std::istream& in, const StationMeta& station) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "t_s,freq_hz") {
    throw ParseError("expected header 't_s,freq_hz', line 1");
  }
  std::vector<double> times;
  std::vector<double> freqs;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = strip_cr(line);
    if (is_blank(row)) continue;
    const auto fields = split_csv(row);
    if (fields.size() != 2) fail("expected 2 columns", line_no);
    const auto t = parse_double(fields[0]);
    const auto f = parse_double(fields[1]);
    if (!t || !std::isfinite(*t)) fail("non-numeric timestamp", line_no);
    if (!f) fail("non-numeric frequency", line_no);
    if (!std::isfinite(*f)) fail("non-finite frequency", line_no);
    times.push_back(*t);
    freqs.push_back(*f);
  }
  if (times.size() < 2) {
    throw ParseError("trace too short: need at least 2 rows, got " +
                     std::to_string(times.size()));
  }
  const std::size_t n = times.size();
  const double dt = (times.back() - times.front()) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) {
    throw ParseError("timestamps must be strictly increasing");
  }
  const double tolerance = 1e-6 * dt;
  for (std::size_t k = 1; k < n; ++k) {
    const double step = times[k] - times[k - 1];
    if (std::abs(step - dt) > tolerance) {
      throw ParseError("non-uniform sample spacing at row " + std::to_string(k + 2) +
                       ": step " + format_double(step) + " vs " + format_double(dt));
    }
  }
  PmuTrace trace;
  trace.station = station;
  trace.t0_s = times.front();
  trace.dt_s = dt;
  trace.freq_hz = std::move(freqs);
  return trace;
}

void write_station_metadata(std::ostream& out, std::span<const StationMeta> stations) {
  out << "station_id,lat_deg,lon_deg\n";
  for (const auto& s : stations) {
    out << s.station_id << ',' << format_double(s.lat_deg) << ','
        << format_double(s.lon_deg) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const PmuTrace& trace) {
  out << "t_s,freq_hz\n";
  for (std::size_t k = 0; k < trace.freq_hz.size(); ++k) {
    out << format_double(trace.time_at(k)) << ',' << format_double(trace.freq_hz[k])
        << '\n';
  }
}

}  // namespace gridwave
