#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "gridwave/errors.hpp"
#include "run_config.hpp"

namespace {

using gridwave::cli::RunConfig;

struct SubcommandState {
  CLI::App* app = nullptr;
  RunConfig flags;        // values as parsed from the command line
  std::string config_path;
  std::function<void(const RunConfig&)> run;
};

void add_common_options(CLI::App* sub, SubcommandState& st) {
  sub->add_option("--config", st.config_path, "JSON config file; flags override its values");
  sub->add_option("--out", st.flags.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--format", st.flags.format, "Grid output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_flag("--overwrite", st.flags.overwrite, "Allow overwriting existing output files");
}

void add_detection_options(CLI::App* sub, SubcommandState& st) {
  sub->add_option("--threshold-mhz", st.flags.threshold_mhz,
                  "Arrival threshold, mHz deviation from baseline")
      ->capture_default_str();
  sub->add_option("--baseline-window-s", st.flags.baseline_window_s,
                  "Pre-event window used for the baseline median, s")
      ->capture_default_str();
  sub->add_option("--direction", st.flags.direction, "Crossing side: below|above|either")
      ->check(CLI::IsMember({"below", "above", "either"}))
      ->capture_default_str();
}

void add_map_options(CLI::App* sub, SubcommandState& st) {
  sub->add_option("--grid-bounds", st.flags.grid_bounds,
                  "'auto' or 'lon_min,lon_max,lat_min,lat_max'")
      ->capture_default_str();
  sub->add_option("--grid-nx", st.flags.grid_nx, "Grid nodes along longitude")
      ->capture_default_str();
  sub->add_option("--grid-ny", st.flags.grid_ny, "Grid nodes along latitude")
      ->capture_default_str();
  sub->add_option("--lambda", st.flags.lambda, "Spline smoothing (0 = exact interpolation)")
      ->capture_default_str();
  sub->add_option("--max-rounds", st.flags.max_rounds, "Outlier rejection rounds")
      ->capture_default_str();
  sub->add_option("--omega-pu", st.flags.omega_pu, "Electrical angular frequency, p.u.")
      ->capture_default_str();
  sub->add_option("--v-pu", st.flags.v_pu, "Voltage magnitude, p.u.")->capture_default_str();
  sub->add_option("--theta-rad", st.flags.theta_rad, "Line impedance angle, rad")
      ->capture_default_str();
  sub->add_option("--z-pu", st.flags.z_pu, "Line impedance magnitude, p.u.")
      ->capture_default_str();
  sub->add_option("--distance-base-km", st.flags.distance_base_km,
                  "km per unit of per-unit distance")
      ->capture_default_str();
  sub->add_option("--eps-grad", st.flags.eps_grad, "Slowness floor for masking, s/km")
      ->capture_default_str();
}

/// defaults < config file < explicitly passed flags.
RunConfig resolve(const SubcommandState& st) {
  RunConfig merged;
  if (!st.config_path.empty()) {
    gridwave::cli::apply_config_file(merged, st.config_path);
  }
  const struct {
    const char* flag;
    std::function<void(RunConfig&, const RunConfig&)> copy;
  } bindings[] = {
      {"--threshold-mhz", [](RunConfig& m, const RunConfig& f) { m.threshold_mhz = f.threshold_mhz; }},
      {"--baseline-window-s",
       [](RunConfig& m, const RunConfig& f) { m.baseline_window_s = f.baseline_window_s; }},
      {"--direction", [](RunConfig& m, const RunConfig& f) { m.direction = f.direction; }},
      {"--grid-bounds", [](RunConfig& m, const RunConfig& f) { m.grid_bounds = f.grid_bounds; }},
      {"--grid-nx", [](RunConfig& m, const RunConfig& f) { m.grid_nx = f.grid_nx; }},
      {"--grid-ny", [](RunConfig& m, const RunConfig& f) { m.grid_ny = f.grid_ny; }},
      {"--lambda", [](RunConfig& m, const RunConfig& f) { m.lambda = f.lambda; }},
      {"--max-rounds", [](RunConfig& m, const RunConfig& f) { m.max_rounds = f.max_rounds; }},
      {"--omega-pu", [](RunConfig& m, const RunConfig& f) { m.omega_pu = f.omega_pu; }},
      {"--v-pu", [](RunConfig& m, const RunConfig& f) { m.v_pu = f.v_pu; }},
      {"--theta-rad", [](RunConfig& m, const RunConfig& f) { m.theta_rad = f.theta_rad; }},
      {"--z-pu", [](RunConfig& m, const RunConfig& f) { m.z_pu = f.z_pu; }},
      {"--distance-base-km",
       [](RunConfig& m, const RunConfig& f) { m.distance_base_km = f.distance_base_km; }},
      {"--eps-grad", [](RunConfig& m, const RunConfig& f) { m.eps_grad = f.eps_grad; }},
      {"--format", [](RunConfig& m, const RunConfig& f) { m.format = f.format; }},
      {"--out", [](RunConfig& m, const RunConfig& f) { m.out_dir = f.out_dir; }},
  };
  for (const auto& b : bindings) {
    const CLI::Option* opt = st.app->get_option_no_throw(b.flag);
    if (opt != nullptr && opt->count() > 0) b.copy(merged, st.flags);
  }
  for (const char* flag :
       {"--omega-pu", "--v-pu", "--theta-rad", "--z-pu", "--distance-base-km"}) {
    const CLI::Option* opt = st.app->get_option_no_throw(flag);
    if (opt != nullptr && opt->count() > 0) merged.continuum_params_set = true;
  }
  merged.overwrite = st.flags.overwrite;
  merged.scenario_path = st.flags.scenario_path;
  merged.stations_path = st.flags.stations_path;
  merged.traces_dir = st.flags.traces_dir;
  merged.tdoa_table_path = st.flags.tdoa_table_path;
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimates power-grid inertia distribution from synchrophasor "
               "frequency wavefront arrival times"};
  app.require_subcommand(1);

  std::vector<SubcommandState> states(4);

  SubcommandState& sim = states[0];
  sim.app = app.add_subcommand("simulate",
                               "Run the continuum wave simulator and export PMU traces");
  sim.app->add_option("--scenario", sim.flags.scenario_path, "Scenario JSON file")->required();
  add_common_options(sim.app, sim);
  sim.run = gridwave::cli::cmd_simulate;

  SubcommandState& tdoa = states[1];
  tdoa.app = app.add_subcommand("tdoa", "Detect disturbance arrival times per station");
  tdoa.app->add_option("--stations", tdoa.flags.stations_path, "Station metadata CSV")
      ->required();
  tdoa.app->add_option("--traces-dir", tdoa.flags.traces_dir,
                       "Directory holding <station_id>.csv traces")
      ->required();
  add_detection_options(tdoa.app, tdoa);
  add_common_options(tdoa.app, tdoa);
  tdoa.run = gridwave::cli::cmd_tdoa;

  SubcommandState& map = states[2];
  map.app = app.add_subcommand(
      "map", "Interpolate TDOAs and invert into speed and inertia fields");
  map.app->add_option("--tdoa", map.flags.tdoa_table_path, "TDOA table CSV (skips detection)");
  map.app->add_option("--stations", map.flags.stations_path, "Station metadata CSV");
  map.app->add_option("--traces-dir", map.flags.traces_dir, "Trace directory");
  add_detection_options(map.app, map);
  add_map_options(map.app, map);
  add_common_options(map.app, map);
  map.run = gridwave::cli::cmd_map;

  SubcommandState& pipe = states[3];
  pipe.app = app.add_subcommand("pipeline",
                                "simulate -> tdoa -> map plus a ground-truth comparison report");
  pipe.app->add_option("--scenario", pipe.flags.scenario_path, "Scenario JSON file")->required();
  add_detection_options(pipe.app, pipe);
  add_map_options(pipe.app, pipe);
  add_common_options(pipe.app, pipe);
  pipe.run = gridwave::cli::cmd_pipeline;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  SubcommandState* active = nullptr;
  for (auto& st : states) {
    if (st.app->parsed()) active = &st;
  }
  if (active == nullptr) {
    std::fprintf(stderr, "error: no subcommand selected\n");
    return 1;
  }

  try {
    RunConfig cfg = resolve(*active);
    if (active == &map && cfg.tdoa_table_path.empty() &&
        (cfg.stations_path.empty() || cfg.traces_dir.empty())) {
      throw gridwave::cli::UsageError(
          "map requires --tdoa or both --stations and --traces-dir");
    }
    active->run(cfg);
    return 0;
  } catch (const gridwave::cli::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const gridwave::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const gridwave::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const gridwave::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const gridwave::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}
