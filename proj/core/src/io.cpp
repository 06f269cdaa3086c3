#include "gridwave/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "gridwave/errors.hpp"
#include "text_util.hpp"

namespace gridwave {

namespace {
using nlohmann::json;
}

std::string format_double(double v) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, ptr);
}

void write_field_csv(std::ostream& out, const ScalarField& field) {
  const GridSpec& grid = field.grid();
  out << "lat_deg\\lon_deg";
  for (int j = 0; j < grid.nx; ++j) out << ',' << format_double(grid.lon_at(j));
  out << '\n';
  for (int i = 0; i < grid.ny; ++i) {
    out << format_double(grid.lat_at(i));
    for (int j = 0; j < grid.nx; ++j) {
      out << ',';
      if (field.is_valid(i, j)) out << format_double(field.at(i, j));
    }
    out << '\n';
  }
}

ScalarField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("field CSV: empty input");
  auto header = detail::split_csv(detail::strip_cr(line));
  if (header.size() < 3 || detail::trim(header[0]) != "lat_deg\\lon_deg") {
    throw ParseError("field CSV: expected 'lat_deg\\lon_deg' header with longitudes");
  }
  std::vector<double> lons;
  for (std::size_t k = 1; k < header.size(); ++k) {
    const auto v = detail::parse_double(header[k]);
    if (!v) throw ParseError("field CSV: non-numeric longitude in header");
    lons.push_back(*v);
  }
  std::vector<double> lats;
  std::vector<double> cells;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = detail::strip_cr(line);
    if (detail::is_blank(row)) continue;
    const auto fields = detail::split_csv(row);
    if (fields.size() != lons.size() + 1) {
      throw ParseError("field CSV: wrong column count, line " + std::to_string(line_no));
    }
    const auto lat = detail::parse_double(fields[0]);
    if (!lat) throw ParseError("field CSV: non-numeric latitude, line " + std::to_string(line_no));
    lats.push_back(*lat);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      const auto trimmed = detail::trim(fields[k]);
      if (trimmed.empty()) {
        cells.push_back(kInvalidValue);
        continue;
      }
      const auto v = detail::parse_double(trimmed);
      if (!v) throw ParseError("field CSV: non-numeric cell, line " + std::to_string(line_no));
      cells.push_back(*v);
    }
  }
  if (lats.size() < 2 || lons.size() < 2) {
    throw ParseError("field CSV: grid needs at least 2 rows and 2 columns");
  }
  GridSpec grid;
  grid.lon_min = lons.front();
  grid.lon_max = lons.back();
  grid.lat_min = lats.front();
  grid.lat_max = lats.back();
  grid.nx = static_cast<int>(lons.size());
  grid.ny = static_cast<int>(lats.size());
  grid.validate();
  ScalarField field(grid);
  field.values() = std::move(cells);
  return field;
}

std::string field_to_json(const ScalarField& field, const std::string& units,
                          const FieldMetadata* metadata) {
  const GridSpec& grid = field.grid();
  json doc;
  doc["grid"] = {{"lon_min", grid.lon_min}, {"lon_max", grid.lon_max},
                 {"lat_min", grid.lat_min}, {"lat_max", grid.lat_max},
                 {"nx", grid.nx},           {"ny", grid.ny}};
  doc["units"] = units;
  json values = json::array();
  for (const double v : field.values()) {
    if (std::isfinite(v)) {
      values.push_back(v);
    } else {
      values.push_back(nullptr);
    }
  }
  doc["values"] = std::move(values);
  if (metadata != nullptr) {
    json meta;
    meta["units"] = metadata->units;
    json params = json::object();
    for (const auto& [key, value] : metadata->params) params[key] = value;
    meta["params"] = std::move(params);
    meta["masked_nodes"] = metadata->masked_nodes;
    meta["edge_one_sided"] = metadata->edge_one_sided;
    doc["metadata"] = std::move(meta);
  }
  return doc.dump(2);
}

ScalarField field_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("field JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("grid") || !doc.contains("values")) {
    throw ParseError("field JSON: expected an object with 'grid' and 'values'");
  }
  const json& g = doc["grid"];
  GridSpec grid;
  try {
    grid.lon_min = g.at("lon_min").get<double>();
    grid.lon_max = g.at("lon_max").get<double>();
    grid.lat_min = g.at("lat_min").get<double>();
    grid.lat_max = g.at("lat_max").get<double>();
    grid.nx = g.at("nx").get<int>();
    grid.ny = g.at("ny").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("field JSON grid: ") + e.what());
  }
  grid.validate();
  const json& values = doc["values"];
  if (!values.is_array() || values.size() != grid.node_count()) {
    throw ParseError("field JSON: 'values' must hold nx*ny entries");
  }
  ScalarField field(grid);
  std::size_t k = 0;
  for (const auto& v : values) {
    if (v.is_null()) {
      field.values()[k++] = kInvalidValue;
    } else if (v.is_number()) {
      field.values()[k++] = v.get<double>();
    } else {
      throw ParseError("field JSON: values must be numbers or null");
    }
  }
  return field;
}

void write_tdoa_table(std::ostream& out, std::span<const StationTdoa> tdoas) {
  out << "station_id,lat_deg,lon_deg,crossing_time_s,tdoa_s,status\n";
  for (const auto& t : tdoas) {
    out << t.station.station_id << ',' << format_double(t.station.lat_deg) << ','
        << format_double(t.station.lon_deg) << ',';
    if (std::isfinite(t.crossing_time_s)) out << format_double(t.crossing_time_s);
    out << ',';
    if (std::isfinite(t.tdoa_s)) out << format_double(t.tdoa_s);
    out << ',' << to_string(t.status) << '\n';
  }
}

std::vector<StationTdoa> read_tdoa_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      detail::strip_cr(line) != "station_id,lat_deg,lon_deg,crossing_time_s,tdoa_s,status") {
    throw ParseError(
        "expected header 'station_id,lat_deg,lon_deg,crossing_time_s,tdoa_s,status', line 1");
  }
  std::vector<StationTdoa> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = detail::strip_cr(line);
    if (detail::is_blank(row)) continue;
    const auto fields = detail::split_csv(row);
    if (fields.size() != 6) {
      throw ParseError("tdoa table: expected 6 columns, line " + std::to_string(line_no));
    }
    StationTdoa t;
    t.station.station_id = std::string(detail::trim(fields[0]));
    if (t.station.station_id.empty()) {
      throw ParseError("tdoa table: empty station_id, line " + std::to_string(line_no));
    }
    const auto lat = detail::parse_double(fields[1]);
    const auto lon = detail::parse_double(fields[2]);
    if (!lat || !lon) {
      throw ParseError("tdoa table: non-numeric coordinates, line " + std::to_string(line_no));
    }
    t.station.lat_deg = *lat;
    t.station.lon_deg = *lon;
    const auto crossing = detail::parse_double(fields[3]);
    const auto tdoa = detail::parse_double(fields[4]);
    t.crossing_time_s = crossing.value_or(kInvalidValue);
    t.tdoa_s = tdoa.value_or(kInvalidValue);
    t.status = tdoa_status_from_string(detail::trim(fields[5]));
    if (t.status == TdoaStatus::kOk && (!crossing || !tdoa)) {
      throw ParseError("tdoa table: ok station missing times, line " + std::to_string(line_no));
    }
    rows.push_back(std::move(t));
  }
  return rows;
}

std::string event_to_json(const EventEstimate& estimate) {
  json doc;
  doc["location"] = {{"lat_deg", estimate.location.lat_deg},
                     {"lon_deg", estimate.location.lon_deg}};
  doc["slope_s_per_km"] = estimate.slope_s_per_km;
  doc["intercept_s"] = estimate.intercept_s;
  json residuals = json::array();
  for (const auto& r : estimate.residuals) {
    residuals.push_back({{"station_id", r.station_id},
                         {"distance_km", r.distance_km},
                         {"tdoa_s", r.tdoa_s},
                         {"residual_s", r.residual_s}});
  }
  doc["residuals"] = std::move(residuals);
  doc["outlier_ids"] = estimate.outlier_ids;
  return doc.dump(2);
}

}  // namespace gridwave
