#include "run_config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gridwave/errors.hpp"

namespace gridwave::cli {

namespace {
using nlohmann::json;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ParseError("config file '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw ParseError("config file '" + path + "' must hold a JSON object");

  const auto number = [&](const char* key, double& target) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number()) throw ParseError(std::string("config key '") + key + "' must be a number");
    target = doc[key].get<double>();
  };
  const auto integer = [&](const char* key, int& target) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer()) throw ParseError(std::string("config key '") + key + "' must be an integer");
    target = doc[key].get<int>();
  };
  const auto text = [&](const char* key, std::string& target) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_string()) throw ParseError(std::string("config key '") + key + "' must be a string");
    target = doc[key].get<std::string>();
  };

  static constexpr const char* kKnownKeys[] = {
      "threshold_mhz", "baseline_window_s", "direction",  "grid_bounds",
      "grid_nx",       "grid_ny",           "lambda",     "max_rounds",
      "omega_pu",      "v_pu",              "theta_rad",  "z_pu",
      "distance_base_km", "eps_grad",       "format"};
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const char* k : kKnownKeys) known = known || key == k;
    if (!known) throw ParseError("config file '" + path + "': unknown key '" + key + "'");
  }

  number("threshold_mhz", cfg.threshold_mhz);
  number("baseline_window_s", cfg.baseline_window_s);
  text("direction", cfg.direction);
  text("grid_bounds", cfg.grid_bounds);
  integer("grid_nx", cfg.grid_nx);
  integer("grid_ny", cfg.grid_ny);
  number("lambda", cfg.lambda);
  integer("max_rounds", cfg.max_rounds);
  number("omega_pu", cfg.omega_pu);
  number("v_pu", cfg.v_pu);
  number("theta_rad", cfg.theta_rad);
  number("z_pu", cfg.z_pu);
  number("distance_base_km", cfg.distance_base_km);
  number("eps_grad", cfg.eps_grad);
  text("format", cfg.format);
  for (const char* key : {"omega_pu", "v_pu", "theta_rad", "z_pu", "distance_base_km"}) {
    if (doc.contains(key)) cfg.continuum_params_set = true;
  }
}

std::string run_config_to_json(const RunConfig& cfg, const std::string& subcommand) {
  json doc;
  doc["subcommand"] = subcommand;
  doc["threshold_mhz"] = cfg.threshold_mhz;
  doc["baseline_window_s"] = cfg.baseline_window_s;
  doc["direction"] = cfg.direction;
  doc["grid_bounds"] = cfg.grid_bounds;
  doc["grid_nx"] = cfg.grid_nx;
  doc["grid_ny"] = cfg.grid_ny;
  doc["lambda"] = cfg.lambda;
  doc["max_rounds"] = cfg.max_rounds;
  doc["omega_pu"] = cfg.omega_pu;
  doc["v_pu"] = cfg.v_pu;
  doc["theta_rad"] = cfg.theta_rad;
  doc["z_pu"] = cfg.z_pu;
  doc["distance_base_km"] = cfg.distance_base_km;
  doc["eps_grad"] = cfg.eps_grad;
  doc["format"] = cfg.format;
  doc["overwrite"] = cfg.overwrite;
  json inputs = json::object();
  if (!cfg.scenario_path.empty()) inputs["scenario"] = cfg.scenario_path;
  if (!cfg.stations_path.empty()) inputs["stations"] = cfg.stations_path;
  if (!cfg.traces_dir.empty()) inputs["traces_dir"] = cfg.traces_dir;
  if (!cfg.tdoa_table_path.empty()) inputs["tdoa_table"] = cfg.tdoa_table_path;
  doc["inputs"] = std::move(inputs);
  doc["out_dir"] = cfg.out_dir;
  return doc.dump(2);
}

}  // namespace gridwave::cli
