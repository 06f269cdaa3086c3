#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "gridwave/errors.hpp"
#include "gridwave/sim.hpp"

namespace gridwave {

namespace {

using nlohmann::json;

double require_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ValidationError("scenario field '" + where + "." + key +
                          "' is missing or not a number");
  }
  return obj[key].get<double>();
}

GridSpec parse_grid(const json& g) {
  if (!g.is_object()) throw ValidationError("scenario field 'grid' must be an object");
  GridSpec grid;
  grid.lon_min = require_number(g, "lon_min", "grid");
  grid.lon_max = require_number(g, "lon_max", "grid");
  grid.lat_min = require_number(g, "lat_min", "grid");
  grid.lat_max = require_number(g, "lat_max", "grid");
  if (!g.contains("nx") || !g["nx"].is_number_integer() || !g.contains("ny") ||
      !g["ny"].is_number_integer()) {
    throw ValidationError("scenario fields 'grid.nx' and 'grid.ny' must be integers");
  }
  grid.nx = g["nx"].get<int>();
  grid.ny = g["ny"].get<int>();
  return grid;
}

std::vector<double> parse_h_field(const json& h, const GridSpec& grid) {
  if (h.is_number()) {
    return uniform_h_field(grid, h.get<double>());
  }
  if (h.is_object() && h.contains("uniform")) {
    if (!h["uniform"].is_number()) {
      throw ValidationError("scenario field 'h_field.uniform' must be a number");
    }
    return uniform_h_field(grid, h["uniform"].get<double>());
  }
  if (h.is_object() && h.contains("regions")) {
    const double background = require_number(h, "background", "h_field");
    if (!h["regions"].is_array()) {
      throw ValidationError("scenario field 'h_field.regions' must be an array");
    }
    std::vector<HRegion> regions;
    for (const auto& r : h["regions"]) {
      HRegion region;
      region.lon_min = require_number(r, "lon_min", "h_field.regions[]");
      region.lon_max = require_number(r, "lon_max", "h_field.regions[]");
      region.lat_min = require_number(r, "lat_min", "h_field.regions[]");
      region.lat_max = require_number(r, "lat_max", "h_field.regions[]");
      region.h = require_number(r, "h", "h_field.regions[]");
      regions.push_back(region);
    }
    return region_h_field(grid, background, regions);
  }
  if (h.is_array()) {
    if (static_cast<int>(h.size()) != grid.ny) {
      throw ValidationError("scenario field 'h_field' must have ny rows");
    }
    std::vector<double> values;
    values.reserve(grid.node_count());
    for (const auto& row : h) {
      if (!row.is_array() || static_cast<int>(row.size()) != grid.nx) {
        throw ValidationError("scenario field 'h_field' rows must have nx numbers");
      }
      for (const auto& v : row) {
        if (!v.is_number()) throw ValidationError("scenario field 'h_field' must be numeric");
        values.push_back(v.get<double>());
      }
    }
    return values;
  }
  throw ValidationError(
      "scenario field 'h_field' must be a number, {\"uniform\": h}, "
      "{\"background\": h, \"regions\": [...]} or a ny x nx array");
}

}  // namespace

SimScenario parse_scenario_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("scenario JSON must be an object");
  if (!doc.contains("grid")) throw ValidationError("scenario field 'grid' is required");

  SimScenario scenario;
  scenario.grid = parse_grid(doc["grid"]);
  scenario.grid.validate();

  if (!doc.contains("h_field")) throw ValidationError("scenario field 'h_field' is required");
  scenario.h_field = parse_h_field(doc["h_field"], scenario.grid);

  if (doc.contains("params")) {
    const json& p = doc["params"];
    if (!p.is_object()) throw ValidationError("scenario field 'params' must be an object");
    if (p.contains("omega_pu")) scenario.params.omega_pu = require_number(p, "omega_pu", "params");
    if (p.contains("v_mag_pu")) scenario.params.v_mag_pu = require_number(p, "v_mag_pu", "params");
    if (p.contains("theta_rad")) scenario.params.theta_rad = require_number(p, "theta_rad", "params");
    if (p.contains("z_mag_pu")) scenario.params.z_mag_pu = require_number(p, "z_mag_pu", "params");
    if (p.contains("distance_base_km")) {
      scenario.params.distance_base_km = require_number(p, "distance_base_km", "params");
    }
  }

  if (!doc.contains("source") || !doc["source"].is_object()) {
    throw ValidationError("scenario field 'source' is required");
  }
  const json& s = doc["source"];
  scenario.source.location.lat_deg = require_number(s, "lat_deg", "source");
  scenario.source.location.lon_deg = require_number(s, "lon_deg", "source");
  if (s.contains("amplitude_rad")) {
    scenario.source.amplitude_rad = require_number(s, "amplitude_rad", "source");
  }
  if (s.contains("sigma_t_s")) scenario.source.sigma_t_s = require_number(s, "sigma_t_s", "source");
  if (s.contains("sigma_deg")) scenario.source.sigma_deg = require_number(s, "sigma_deg", "source");
  if (s.contains("t_center_s")) {
    scenario.source.t_center_s = require_number(s, "t_center_s", "source");
  }

  if (!doc.contains("probes") || !doc["probes"].is_array()) {
    throw ValidationError("scenario field 'probes' is required and must be an array");
  }
  for (const auto& p : doc["probes"]) {
    if (!p.is_object() || !p.contains("station_id") || !p["station_id"].is_string()) {
      throw ValidationError("scenario field 'probes[]' entries need a string station_id");
    }
    StationMeta st;
    st.station_id = p["station_id"].get<std::string>();
    st.lat_deg = require_number(p, "lat_deg", "probes[]");
    st.lon_deg = require_number(p, "lon_deg", "probes[]");
    scenario.probes.push_back(std::move(st));
  }

  scenario.duration_s = require_number(doc, "duration_s", "");
  scenario.sample_dt_s = require_number(doc, "sample_dt_s", "");
  if (doc.contains("wavefront_threshold_mhz")) {
    scenario.wavefront_threshold_mhz = require_number(doc, "wavefront_threshold_mhz", "");
  }
  if (doc.contains("corruptions")) {
    if (!doc["corruptions"].is_array()) {
      throw ValidationError("scenario field 'corruptions' must be an array");
    }
    for (const auto& c : doc["corruptions"]) {
      if (!c.is_object() || !c.contains("station_id") || !c["station_id"].is_string()) {
        throw ValidationError("scenario field 'corruptions[]' entries need a station_id");
      }
      TraceCorruption tc;
      tc.station_id = c["station_id"].get<std::string>();
      tc.time_offset_s = require_number(c, "time_offset_s", "corruptions[]");
      scenario.corruptions.push_back(std::move(tc));
    }
  }

  scenario.validate();
  return scenario;
}

SimScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_json(buffer.str());
}

}  // namespace gridwave
