#pragma once

#include <filesystem>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridwave/field.hpp"
#include "gridwave/inertia.hpp"
#include "gridwave/ingest.hpp"

namespace gridwave {

/// Disturbance injected into the angle field: a Gaussian velocity pulse
/// in space (sigma_deg about the source) and time (sigma_t_s wide,
/// centered at t_center_s; defaults to 4 * sigma_t_s when unset).
struct DisturbanceSource {
  GeoPoint location{};
  double amplitude_rad = -8.0 * std::numbers::pi;
  double sigma_t_s = 0.15;
  double sigma_deg = 0.5;
  std::optional<double> t_center_s;

  double resolved_t_center_s() const { return t_center_s.value_or(4.0 * sigma_t_s); }
};

/// Timing fault injected into one probe's exported trace (the measured
/// timestamps shift; the physics does not).
struct TraceCorruption {
  std::string station_id;
  double time_offset_s{};
};

struct SimScenario {
  GridSpec grid{};
  std::vector<double> h_field;  // ny*nx inertia values, all > 0
  ContinuumParams params{};
  DisturbanceSource source{};
  std::vector<StationMeta> probes;
  double duration_s{};
  double sample_dt_s{};
  double wavefront_threshold_mhz = 20.0;
  std::vector<TraceCorruption> corruptions;

  void validate() const;
};

struct SimResult {
  std::vector<PmuTrace> traces;   // one per probe, epoch t0 = 0
  ScalarField wavefront_times;    // first threshold crossing per node, s
  double cfl_dt_s{};              // integration step actually used
  bool reflection_window_ok = true;
  /// Trapezoid-weighted discrete wave energy, sampled over the run.
  std::vector<double> energy_times_s;
  std::vector<double> energy;
};

/// Continuum propagation speed c = sqrt(omega V^2 sin(theta) / (2 |z| h))
/// scaled by distance_base_km; exact algebraic forward of
/// inertia_from_speed_kms. Throws ValidationError for h <= 0.
double local_speed(double h, const ContinuumParams& params);

/// Integrates d2/dt2 delta = c(x,y)^2 laplacian(delta) on the scenario
/// lattice (5-point Laplacian, physical spacings per row, explicit
/// leapfrog at CFL safety 0.5, reflecting boundaries) and records probe
/// frequency traces f = f0 + (1/2pi) d(delta)/dt plus the ground-truth
/// wavefront arrival surface.
SimResult simulate(const SimScenario& scenario);

/// Writes stations.csv plus one <station_id>.csv trace per probe, in the
/// ingest formats.
void export_scenario_traces(const SimResult& result, const std::filesystem::path& dir);

SimScenario parse_scenario_json(std::string_view text);
SimScenario load_scenario(const std::filesystem::path& path);

/// Convenience builders for scenario inertia maps.
std::vector<double> uniform_h_field(const GridSpec& grid, double h);

struct HRegion {
  double lon_min{}, lon_max{}, lat_min{}, lat_max{};
  double h{};
};
std::vector<double> region_h_field(const GridSpec& grid, double background,
                                   std::span<const HRegion> regions);

}  // namespace gridwave
