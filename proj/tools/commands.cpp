#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridwave/errors.hpp"
#include "gridwave/event.hpp"
#include "gridwave/inertia.hpp"
#include "gridwave/io.hpp"
#include "gridwave/sim.hpp"
#include "gridwave/tdoa.hpp"

namespace gridwave::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Rethrows module errors with the pipeline stage prepended.
template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) {
  const auto tag = [&](const auto& e) { return std::string(stage) + ": " + e.what(); };
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(tag(e));
  } catch (const ValidationError& e) {
    throw ValidationError(tag(e));
  } catch (const NumericalError& e) {
    throw NumericalError(tag(e));
  } catch (const IoError& e) {
    throw IoError(tag(e));
  }
}

/// Collects planned output paths, refuses to clobber without --overwrite,
/// and performs the writes.
class OutputDir {
 public:
  OutputDir(const RunConfig& cfg) : dir_(cfg.out_dir), overwrite_(cfg.overwrite) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "'");
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = path(name);
    if (!overwrite_ && fs::exists(p)) {
      throw UsageError("refusing to overwrite '" + p.string() + "' (pass --overwrite)");
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + p.string() + "'");
  }

  void guard(const std::string& name) const {
    const fs::path p = path(name);
    if (!overwrite_ && fs::exists(p)) {
      throw UsageError("refusing to overwrite '" + p.string() + "' (pass --overwrite)");
    }
  }

 private:
  fs::path dir_;
  bool overwrite_;
};

DetectionConfig detection_config(const RunConfig& cfg) {
  DetectionConfig dc;
  dc.threshold_mhz = cfg.threshold_mhz;
  dc.baseline_window_s = cfg.baseline_window_s;
  dc.direction = direction_from_string(cfg.direction);
  return dc;
}

ContinuumParams continuum_params(const RunConfig& cfg) {
  ContinuumParams p;
  p.omega_pu = cfg.omega_pu;
  p.v_mag_pu = cfg.v_pu;
  p.theta_rad = cfg.theta_rad;
  p.z_mag_pu = cfg.z_pu;
  p.distance_base_km = cfg.distance_base_km;
  p.validate();
  return p;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<StationMeta> load_stations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stations file '" + path + "'");
  return parse_station_metadata(in);
}

std::vector<PmuTrace> load_traces(const std::vector<StationMeta>& stations,
                                  const std::string& traces_dir) {
  std::vector<PmuTrace> traces;
  traces.reserve(stations.size());
  for (const auto& st : stations) {
    const fs::path path = fs::path(traces_dir) / (st.station_id + ".csv");
    std::ifstream in(path);
    if (!in) throw IoError("missing trace file '" + path.string() + "'");
    try {
      traces.push_back(parse_trace_csv(in, st));
    } catch (const ParseError& e) {
      throw ParseError("station '" + st.station_id + "' (" + path.string() + "): " + e.what());
    }
  }
  return traces;
}

GridSpec resolve_grid(const RunConfig& cfg, std::span<const StationTdoa> tdoas) {
  GridSpec grid;
  grid.nx = cfg.grid_nx;
  grid.ny = cfg.grid_ny;
  if (cfg.grid_bounds == "auto") {
    double lon_min = std::numeric_limits<double>::infinity();
    double lon_max = -lon_min;
    double lat_min = lon_min;
    double lat_max = -lon_min;
    int n = 0;
    for (const auto& t : tdoas) {
      if (t.status != TdoaStatus::kOk) continue;
      lon_min = std::min(lon_min, t.station.lon_deg);
      lon_max = std::max(lon_max, t.station.lon_deg);
      lat_min = std::min(lat_min, t.station.lat_deg);
      lat_max = std::max(lat_max, t.station.lat_deg);
      ++n;
    }
    if (n == 0) throw ValidationError("grid auto-bounds: no ok stations");
    const double span_lon = lon_max - lon_min;
    const double span_lat = lat_max - lat_min;
    const double pad_lon = span_lon > 0.0 ? 0.1 * span_lon : 0.5;
    const double pad_lat = span_lat > 0.0 ? 0.1 * span_lat : 0.5;
    grid.lon_min = lon_min - pad_lon;
    grid.lon_max = lon_max + pad_lon;
    grid.lat_min = std::max(-90.0, lat_min - pad_lat);
    grid.lat_max = std::min(90.0, lat_max + pad_lat);
  } else {
    std::istringstream in(cfg.grid_bounds);
    char c1, c2, c3;
    if (!(in >> grid.lon_min >> c1 >> grid.lon_max >> c2 >> grid.lat_min >> c3 >>
          grid.lat_max) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw UsageError("--grid-bounds expects 'auto' or 'lon_min,lon_max,lat_min,lat_max'");
    }
  }
  grid.validate();
  return grid;
}

std::string field_csv(const ScalarField& field) {
  std::ostringstream out;
  write_field_csv(out, field);
  return out.str();
}

void write_field(OutputDir& out, const RunConfig& cfg, const std::string& stem,
                 const ScalarField& field, const std::string& units,
                 const FieldMetadata* metadata = nullptr) {
  if (cfg.format == "json") {
    out.write(stem + ".json", field_to_json(field, units, metadata));
  } else {
    out.write(stem + ".csv", field_csv(field));
  }
}

struct MapOutputs {
  ScalarField tdoa_field;
  ScalarField speed;
  ScalarField inertia;
  EventEstimate estimate;
  GridSpec grid;
};

MapOutputs run_map_stages(const RunConfig& cfg, std::span<const StationTdoa> tdoas) {
  MapOutputs r;
  r.grid = with_stage("grid", [&] { return resolve_grid(cfg, tdoas); });
  auto validated = with_stage("interpolate", [&] {
    return validate_and_interpolate(tdoas, r.grid, cfg.lambda, cfg.max_rounds);
  });
  r.tdoa_field = std::move(validated.field);
  r.estimate = std::move(validated.estimate);
  const VectorField grad = with_stage("gradient", [&] { return gradient_field(r.tdoa_field); });
  r.speed = with_stage("speed", [&] { return speed_field(grad, cfg.eps_grad); });
  r.inertia = with_stage("inertia", [&] {
    return inertia_from_speed(r.speed, continuum_params(cfg));
  });
  return r;
}

void write_map_outputs(OutputDir& out, const RunConfig& cfg, const MapOutputs& maps) {
  write_field(out, cfg, "tdoa_field", maps.tdoa_field, "s");
  const std::vector<std::pair<std::string, double>> params = {
      {"omega_pu", cfg.omega_pu},
      {"v_pu", cfg.v_pu},
      {"theta_rad", cfg.theta_rad},
      {"z_pu", cfg.z_pu},
      {"distance_base_km", cfg.distance_base_km},
      {"eps_grad_s_per_km", cfg.eps_grad}};
  FieldMetadata speed_meta{"km/s", params, maps.speed.masked_count(), true};
  write_field(out, cfg, "speed_field", maps.speed, "km/s", &speed_meta);
  FieldMetadata h_meta{"relative", params, maps.inertia.masked_count(), true};
  write_field(out, cfg, "inertia_field", maps.inertia, "relative", &h_meta);
  out.write("event.json", event_to_json(maps.estimate));
}

std::string tdoa_table_csv(std::span<const StationTdoa> tdoas) {
  std::ostringstream out;
  write_tdoa_table(out, tdoas);
  return out.str();
}

ScalarField h_true_field(const SimScenario& scenario) {
  ScalarField f(scenario.grid);
  f.values() = scenario.h_field;
  return f;
}

std::string sim_meta_json(const SimScenario& scenario, const SimResult& result) {
  json doc;
  doc["cfl_dt_s"] = result.cfl_dt_s;
  doc["reflection_window_ok"] = result.reflection_window_ok;
  doc["wavefront_threshold_mhz"] = scenario.wavefront_threshold_mhz;
  doc["probes"] = scenario.probes.size();
  doc["energy_times_s"] = result.energy_times_s;
  doc["energy"] = result.energy;
  return doc.dump(2);
}

/// Region boxes for the pipeline comparison report, recovered from the
/// scenario JSON's h_field form (physics only keeps the flat array).
struct ReportRegion {
  std::string name;
  HRegion box{};
};

std::vector<ReportRegion> report_regions(const std::string& scenario_path,
                                         const SimScenario& scenario) {
  std::vector<ReportRegion> regions;
  const json doc = json::parse(slurp(scenario_path));
  const HRegion whole{scenario.grid.lon_min, scenario.grid.lon_max, scenario.grid.lat_min,
                      scenario.grid.lat_max, 0.0};
  if (doc.contains("h_field") && doc["h_field"].is_object() &&
      doc["h_field"].contains("regions")) {
    int index = 0;
    for (const auto& r : doc["h_field"]["regions"]) {
      ReportRegion region;
      region.name = "region" + std::to_string(++index);
      region.box = {r["lon_min"].get<double>(), r["lon_max"].get<double>(),
                    r["lat_min"].get<double>(), r["lat_max"].get<double>(), 0.0};
      regions.push_back(std::move(region));
    }
    regions.push_back({"background", whole});
  } else {
    regions.push_back({"all", whole});
  }
  return regions;
}

double median(std::vector<double> values) {
  if (values.empty()) return kInvalidValue;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(values.begin(), values.begin() + mid));
  }
  return m;
}

std::string comparison_report_json(const SimScenario& scenario, const MapOutputs& maps,
                                   const std::vector<ReportRegion>& regions) {
  // True h sampled at the sim node nearest each map-grid node.
  const GridSpec& mg = maps.grid;
  const GridSpec& sg = scenario.grid;
  const auto true_h_at = [&](const GeoPoint& p) -> std::optional<double> {
    if (p.lon_deg < sg.lon_min || p.lon_deg > sg.lon_max || p.lat_deg < sg.lat_min ||
        p.lat_deg > sg.lat_max) {
      return std::nullopt;
    }
    const int i = std::clamp(
        static_cast<int>(std::lround((p.lat_deg - sg.lat_min) / sg.dlat())), 0, sg.ny - 1);
    const int j = std::clamp(
        static_cast<int>(std::lround((p.lon_deg - sg.lon_min) / sg.dlon())), 0, sg.nx - 1);
    return scenario.h_field[static_cast<std::size_t>(i) * sg.nx + j];
  };

  const auto in_box = [](const HRegion& box, const GeoPoint& p) {
    return p.lon_deg >= box.lon_min && p.lon_deg <= box.lon_max && p.lat_deg >= box.lat_min &&
           p.lat_deg <= box.lat_max;
  };

  // Node ownership mirrors region_h_field: the last explicit box containing
  // a node wins; unclaimed nodes fall to the trailing background/all entry.
  const auto owner_of = [&](const GeoPoint& node) {
    std::size_t owner = regions.size() - 1;  // background/all entry comes last
    for (std::size_t q = 0; q < regions.size(); ++q) {
      if (regions[q].name == "background" || regions[q].name == "all") continue;
      if (in_box(regions[q].box, node)) owner = q;
    }
    return owner;
  };

  json region_entries = json::array();
  for (std::size_t r = 0; r < regions.size(); ++r) {
    std::vector<double> rec_h, rec_speed, true_h, true_speed;
    for (int i = 1; i + 1 < mg.ny; ++i) {
      for (int j = 1; j + 1 < mg.nx; ++j) {
        const GeoPoint node = mg.node(i, j);
        if (!in_box(regions[r].box, node) || owner_of(node) != r) continue;
        const auto h0 = true_h_at(node);
        if (!h0) continue;
        true_h.push_back(*h0);
        true_speed.push_back(local_speed(*h0, scenario.params));
        if (maps.inertia.is_valid(i, j)) rec_h.push_back(maps.inertia.at(i, j));
        if (maps.speed.is_valid(i, j)) rec_speed.push_back(maps.speed.at(i, j));
      }
    }
    json entry;
    entry["name"] = regions[r].name;
    entry["lon_min"] = regions[r].box.lon_min;
    entry["lon_max"] = regions[r].box.lon_max;
    entry["lat_min"] = regions[r].box.lat_min;
    entry["lat_max"] = regions[r].box.lat_max;
    entry["interior_nodes"] = rec_h.size();
    entry["h_true_median"] = median(true_h);
    entry["h_recovered_median"] = median(rec_h);
    const double ratio = median(rec_h) / median(true_h);
    entry["h_ratio_recovered_over_true"] = std::isfinite(ratio) ? json(ratio) : json();
    entry["speed_true_median"] = median(true_speed);
    entry["speed_recovered_median"] = median(rec_speed);
    region_entries.push_back(std::move(entry));
  }

  json doc;
  doc["regions"] = std::move(region_entries);
  doc["outliers_detected"] = maps.estimate.outlier_ids;
  json injected = json::array();
  for (const auto& c : scenario.corruptions) {
    injected.push_back({{"station_id", c.station_id}, {"time_offset_s", c.time_offset_s}});
  }
  doc["corruptions_injected"] = std::move(injected);
  doc["event"] = {{"lat_deg", maps.estimate.location.lat_deg},
                  {"lon_deg", maps.estimate.location.lon_deg},
                  {"slope_s_per_km", maps.estimate.slope_s_per_km},
                  {"intercept_s", maps.estimate.intercept_s}};
  return doc.dump(2);
}

void export_sim_outputs(OutputDir& out, const RunConfig& cfg, const SimScenario& scenario,
                        const SimResult& result) {
  out.guard("stations.csv");
  for (const auto& t : result.traces) out.guard(t.station.station_id + ".csv");
  with_stage("export", [&] {
    export_scenario_traces(result, fs::path(cfg.out_dir));
    return 0;
  });
  write_field(out, cfg, "wavefront_times", result.wavefront_times, "s");
  write_field(out, cfg, "h_true", h_true_field(scenario), "relative");
  out.write("sim_meta.json", sim_meta_json(scenario, result));
}

}  // namespace

void cmd_simulate(const RunConfig& cfg) {
  OutputDir out(cfg);
  const SimScenario scenario =
      with_stage("scenario", [&] { return load_scenario(cfg.scenario_path); });
  out.write("run_config.json", run_config_to_json(cfg, "simulate"));
  const SimResult result = with_stage("simulate", [&] { return simulate(scenario); });
  export_sim_outputs(out, cfg, scenario, result);
}

void cmd_tdoa(const RunConfig& cfg) {
  OutputDir out(cfg);
  out.write("run_config.json", run_config_to_json(cfg, "tdoa"));
  const auto stations = with_stage("ingest", [&] { return load_stations(cfg.stations_path); });
  const auto traces = with_stage("ingest", [&] { return load_traces(stations, cfg.traces_dir); });
  const auto tdoas =
      with_stage("detect", [&] { return compute_tdoas(traces, detection_config(cfg)); });
  out.write("tdoa.csv", tdoa_table_csv(tdoas));
}

void cmd_map(const RunConfig& cfg) {
  OutputDir out(cfg);
  out.write("run_config.json", run_config_to_json(cfg, "map"));
  std::vector<StationTdoa> tdoas;
  if (!cfg.tdoa_table_path.empty()) {
    tdoas = with_stage("ingest", [&] {
      std::ifstream in(cfg.tdoa_table_path);
      if (!in) throw IoError("cannot open tdoa table '" + cfg.tdoa_table_path + "'");
      return read_tdoa_table(in);
    });
  } else {
    const auto stations = with_stage("ingest", [&] { return load_stations(cfg.stations_path); });
    const auto traces =
        with_stage("ingest", [&] { return load_traces(stations, cfg.traces_dir); });
    tdoas = with_stage("detect", [&] { return compute_tdoas(traces, detection_config(cfg)); });
  }
  const MapOutputs maps = run_map_stages(cfg, tdoas);
  write_map_outputs(out, cfg, maps);
}

void cmd_pipeline(const RunConfig& cfg_in) {
  OutputDir out(cfg_in);
  const SimScenario scenario =
      with_stage("scenario", [&] { return load_scenario(cfg_in.scenario_path); });
  // Unless pinned by the user, invert with the parameters that generated
  // the data so the comparison report is apples-to-apples.
  RunConfig cfg = cfg_in;
  if (!cfg.continuum_params_set) {
    cfg.omega_pu = scenario.params.omega_pu;
    cfg.v_pu = scenario.params.v_mag_pu;
    cfg.theta_rad = scenario.params.theta_rad;
    cfg.z_pu = scenario.params.z_mag_pu;
    cfg.distance_base_km = scenario.params.distance_base_km;
  }
  out.write("run_config.json", run_config_to_json(cfg, "pipeline"));
  const SimResult result = with_stage("simulate", [&] { return simulate(scenario); });
  export_sim_outputs(out, cfg, scenario, result);

  // Re-ingest through the exported files so the full measurement path runs.
  const auto stations = with_stage("ingest", [&] {
    return load_stations(out.path("stations.csv").string());
  });
  const auto traces =
      with_stage("ingest", [&] { return load_traces(stations, cfg.out_dir); });
  const auto tdoas =
      with_stage("detect", [&] { return compute_tdoas(traces, detection_config(cfg)); });
  out.write("tdoa.csv", tdoa_table_csv(tdoas));

  const MapOutputs maps = run_map_stages(cfg, tdoas);
  write_map_outputs(out, cfg, maps);
  const auto regions = report_regions(cfg.scenario_path, scenario);
  out.write("comparison_report.json", comparison_report_json(scenario, maps, regions));
}

}  // namespace gridwave::cli
