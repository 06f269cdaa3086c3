#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace gridwave::cli {

/// Wrong invocation (bad flags, refusing to overwrite); exits with code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fully resolved run parameters. Defaults < config file < command line.
struct RunConfig {
  // detection
  double threshold_mhz = 20.0;
  double baseline_window_s = 2.0;
  std::string direction = "below";
  // map grid ("auto" = station bounding box padded by 10% per side)
  std::string grid_bounds = "auto";
  int grid_nx = 61;
  int grid_ny = 61;
  // interpolation / validation
  double lambda = 0.0;
  int max_rounds = 3;
  // continuum parameters
  double omega_pu = 1.0;
  double v_pu = 1.0;
  double theta_rad = std::numbers::pi / 2.0;
  double z_pu = 1.0;
  double distance_base_km = 1.0;
  double eps_grad = 1e-9;  // slowness floor, s/km
  /// True when the user pinned continuum parameters via flags or config;
  /// otherwise `pipeline` adopts the scenario's parameters for inversion.
  bool continuum_params_set = false;
  // output
  std::string format = "csv";
  bool overwrite = false;

  // inputs (per subcommand)
  std::string scenario_path;
  std::string stations_path;
  std::string traces_dir;
  std::string tdoa_table_path;
  std::string out_dir = ".";
};

/// Applies values from a JSON config file on top of cfg. Unknown keys are
/// rejected so typos do not silently fall back to defaults.
void apply_config_file(RunConfig& cfg, const std::string& path);

/// Serialized resolved config, written alongside outputs for reproducibility.
std::string run_config_to_json(const RunConfig& cfg, const std::string& subcommand);

}  // namespace gridwave::cli
