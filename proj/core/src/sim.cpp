#include "gridwave/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_set>
#include <utility>

#include "gridwave/errors.hpp"
#include "gridwave/geo.hpp"

namespace gridwave {

namespace {

constexpr double kCflSafety = 0.5;
constexpr double kNominalFrequencyHz = 60.0;
constexpr double kInstabilityLimit = 1e6;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool inside_grid(const GridSpec& grid, const GeoPoint& p) {
  return p.lon_deg >= grid.lon_min && p.lon_deg <= grid.lon_max &&
         p.lat_deg >= grid.lat_min && p.lat_deg <= grid.lat_max;
}

}  // namespace

double local_speed(double h, const ContinuumParams& params) {
  params.validate();
  if (!(h > 0.0)) throw ValidationError("inertia h must be > 0");
  const double c_pu = std::sqrt(params.omega_pu * params.v_mag_pu * params.v_mag_pu *
                                std::sin(params.theta_rad) / (2.0 * params.z_mag_pu * h));
  return c_pu * params.distance_base_km;
}

void SimScenario::validate() const {
  grid.validate();
  if (grid.lat_min <= -90.0 || grid.lat_max >= 90.0) {
    throw ValidationError("grid: simulation latitude range must stay inside (-90, 90)");
  }
  if (h_field.size() != grid.node_count()) {
    throw ValidationError("h_field: expected " + std::to_string(grid.node_count()) +
                          " values, got " + std::to_string(h_field.size()));
  }
  for (double h : h_field) {
    if (!std::isfinite(h) || h <= 0.0) throw ValidationError("h_field: h must be positive");
  }
  params.validate();
  if (!is_valid(source.location) || !inside_grid(grid, source.location)) {
    throw ValidationError("source: location must lie inside the grid");
  }
  if (!(source.sigma_t_s > 0.0)) throw ValidationError("source: sigma_t_s must be > 0");
  if (!(source.sigma_deg > 0.0)) throw ValidationError("source: sigma_deg must be > 0");
  if (!std::isfinite(source.amplitude_rad) || source.amplitude_rad == 0.0) {
    throw ValidationError("source: amplitude_rad must be finite and nonzero");
  }
  std::unordered_set<std::string> ids;
  for (const auto& p : probes) {
    if (p.station_id.empty()) throw ValidationError("probes: station_id must be non-empty");
    if (!ids.insert(p.station_id).second) {
      throw ValidationError("probes: duplicate station_id '" + p.station_id + "'");
    }
    if (!is_valid(p.location()) || !inside_grid(grid, p.location())) {
      throw ValidationError("probes: station '" + p.station_id +
                            "' must lie inside the grid");
    }
  }
  if (!(duration_s > 0.0)) throw ValidationError("duration_s must be > 0");
  if (!(sample_dt_s > 0.0)) throw ValidationError("sample_dt_s must be > 0");
  if (!(wavefront_threshold_mhz > 0.0)) {
    throw ValidationError("wavefront_threshold_mhz must be > 0");
  }
  for (const auto& c : corruptions) {
    if (!ids.contains(c.station_id)) {
      throw ValidationError("corruptions: unknown station_id '" + c.station_id + "'");
    }
    if (!std::isfinite(c.time_offset_s)) {
      throw ValidationError("corruptions: time_offset_s must be finite");
    }
  }
}

SimResult simulate(const SimScenario& scenario) {
  scenario.validate();
  const GridSpec& grid = scenario.grid;
  const int nx = grid.nx;
  const int ny = grid.ny;
  const std::size_t n = grid.node_count();
  const auto idx = [nx](int i, int j) { return static_cast<std::size_t>(i) * nx + j; };

  // Physical spacings: one per row along longitude, constant along latitude.
  std::vector<double> dx_row(ny);
  for (int i = 0; i < ny; ++i) {
    dx_row[i] = degree_coefficients(grid.node(i, 0)).c_lon_km_per_deg * grid.dlon();
  }
  const double dy = kKmPerDegree * grid.dlat();

  std::vector<double> c2(n);
  double c_max = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double c = local_speed(scenario.h_field[k], scenario.params);
    c2[k] = c * c;
    c_max = std::max(c_max, c);
  }

  const double min_spacing = std::min(*std::min_element(dx_row.begin(), dx_row.end()), dy);
  const double dt = kCflSafety * min_spacing / (c_max * std::numbers::sqrt2);
  const double steps_needed = std::ceil(scenario.duration_s / dt);
  if (!(steps_needed < 5e7)) {
    throw ValidationError("scenario needs " + std::to_string(steps_needed) +
                          " integration steps (CFL dt=" + std::to_string(dt) +
                          " s); shrink the domain, duration or wave speed");
  }
  const long n_steps = static_cast<long>(steps_needed);

  // Spatial source profile and normalized temporal envelope.
  const double t_center = scenario.source.resolved_t_center_s();
  const double sigma_t = scenario.source.sigma_t_s;
  const double inv_two_sigma_deg2 =
      1.0 / (2.0 * scenario.source.sigma_deg * scenario.source.sigma_deg);
  const double envelope_norm = 1.0 / (sigma_t * std::sqrt(kTwoPi));
  std::vector<double> source_profile(n);
  for (int i = 0; i < ny; ++i) {
    for (int j = 0; j < nx; ++j) {
      const GeoPoint node = grid.node(i, j);
      const double dlon = node.lon_deg - scenario.source.location.lon_deg;
      const double dlat = node.lat_deg - scenario.source.location.lat_deg;
      source_profile[idx(i, j)] = scenario.source.amplitude_rad *
                                  std::exp(-(dlon * dlon + dlat * dlat) * inv_two_sigma_deg2);
    }
  }
  const auto envelope = [&](double t) {
    const double u = (t - t_center) / sigma_t;
    return envelope_norm * std::exp(-0.5 * u * u);
  };

  // Probe bookkeeping.
  const std::size_t n_probes = scenario.probes.size();
  std::vector<std::size_t> probe_node(n_probes);
  for (std::size_t p = 0; p < n_probes; ++p) {
    const auto& st = scenario.probes[p];
    const int i = std::clamp(
        static_cast<int>(std::lround((st.lat_deg - grid.lat_min) / grid.dlat())), 0, ny - 1);
    const int j = std::clamp(
        static_cast<int>(std::lround((st.lon_deg - grid.lon_min) / grid.dlon())), 0, nx - 1);
    probe_node[p] = idx(i, j);
  }
  const std::size_t n_samples =
      static_cast<std::size_t>(std::floor(scenario.duration_s / scenario.sample_dt_s + 1e-9)) + 1;
  std::vector<std::vector<double>> probe_freq(n_probes,
                                              std::vector<double>(n_samples, kNominalFrequencyHz));

  SimResult result;
  result.cfl_dt_s = dt;
  result.wavefront_times = ScalarField(grid);

  const double threshold_hz = scenario.wavefront_threshold_mhz * 1e-3;
  std::vector<double> prev(n, 0.0);
  std::vector<double> cur(n);
  std::vector<double> next(n);
  for (std::size_t k = 0; k < n; ++k) {
    cur[k] = 0.5 * dt * dt * source_profile[k] * envelope(0.0);
  }

  std::vector<double> prev_v(n, 0.0);
  std::vector<double> cur_v(n);
  double prev_v_t = 0.0;

  std::vector<double>& wavefront = result.wavefront_times.values();
  std::size_t sample_cursor = 0;

  const auto process_velocity_knot = [&](double cur_v_t) {
    // Ground-truth arrival: first time |f - f0| reaches the threshold,
    // interpolated linearly between velocity knots.
    for (std::size_t k = 0; k < n; ++k) {
      if (std::isfinite(wavefront[k])) continue;
      const double dev = std::abs(cur_v[k]) / kTwoPi;
      if (dev < threshold_hz) continue;
      const double dev_prev = std::abs(prev_v[k]) / kTwoPi;
      const double rise = dev - dev_prev;
      const double frac = rise > 0.0 ? std::clamp((threshold_hz - dev_prev) / rise, 0.0, 1.0) : 0.0;
      wavefront[k] = prev_v_t + frac * (cur_v_t - prev_v_t);
    }
    // Probe traces, sampled on the reporting clock.
    while (sample_cursor < n_samples) {
      const double ts = static_cast<double>(sample_cursor) * scenario.sample_dt_s;
      if (ts > cur_v_t) break;
      const double a = (ts - prev_v_t) / (cur_v_t - prev_v_t);
      for (std::size_t p = 0; p < n_probes; ++p) {
        const double v = prev_v[probe_node[p]] +
                         a * (cur_v[probe_node[p]] - prev_v[probe_node[p]]);
        probe_freq[p][sample_cursor] = kNominalFrequencyHz + v / kTwoPi;
      }
      ++sample_cursor;
    }
  };

  // First velocity knot at t = dt/2.
  for (std::size_t k = 0; k < n; ++k) cur_v[k] = (cur[k] - prev[k]) / dt;
  process_velocity_knot(0.5 * dt);
  std::swap(prev_v, cur_v);
  prev_v_t = 0.5 * dt;

  const long energy_stride =
      std::max<long>(1, static_cast<long>(std::llround(scenario.sample_dt_s / dt)));
  const double inv_dy2 = 1.0 / (dy * dy);

  for (long step = 1; step <= n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    const double forcing = envelope(t);
    for (int i = 0; i < ny; ++i) {
      const int im = (i == 0) ? 1 : i - 1;
      const int ip = (i == ny - 1) ? ny - 2 : i + 1;
      const double inv_dx2 = 1.0 / (dx_row[i] * dx_row[i]);
      for (int j = 0; j < nx; ++j) {
        const int jm = (j == 0) ? 1 : j - 1;
        const int jp = (j == nx - 1) ? nx - 2 : j + 1;
        const std::size_t k = idx(i, j);
        const double center = cur[k];
        const double lap = (cur[idx(i, jm)] - 2.0 * center + cur[idx(i, jp)]) * inv_dx2 +
                           (cur[idx(im, j)] - 2.0 * center + cur[idx(ip, j)]) * inv_dy2;
        next[k] = 2.0 * center - prev[k] + dt * dt * (c2[k] * lap + source_profile[k] * forcing);
      }
    }

    for (std::size_t k = 0; k < n; ++k) cur_v[k] = (next[k] - cur[k]) / dt;
    process_velocity_knot(t + 0.5 * dt);
    std::swap(prev_v, cur_v);
    prev_v_t = t + 0.5 * dt;

    if (step % energy_stride == 0 || step == n_steps) {
      // Trapezoid-weighted discrete energy: sum of squared centered
      // velocities plus edge-based gradient energy with averaged c^2.
      double kinetic = 0.0;
      for (int i = 0; i < ny; ++i) {
        const double wi = (i == 0 || i == ny - 1) ? 0.5 : 1.0;
        for (int j = 0; j < nx; ++j) {
          const double w = wi * ((j == 0 || j == nx - 1) ? 0.5 : 1.0);
          const std::size_t k = idx(i, j);
          const double v = (next[k] - prev[k]) / (2.0 * dt);
          kinetic += w * v * v;
        }
      }
      double potential = 0.0;
      for (int i = 0; i < ny; ++i) {
        const double w = (i == 0 || i == ny - 1) ? 0.5 : 1.0;
        const double inv_dx = 1.0 / dx_row[i];
        for (int j = 0; j + 1 < nx; ++j) {
          const double g = (cur[idx(i, j + 1)] - cur[idx(i, j)]) * inv_dx;
          potential += w * 0.5 * (c2[idx(i, j)] + c2[idx(i, j + 1)]) * g * g;
        }
      }
      for (int i = 0; i + 1 < ny; ++i) {
        for (int j = 0; j < nx; ++j) {
          const double w = (j == 0 || j == nx - 1) ? 0.5 : 1.0;
          const double g = (cur[idx(i + 1, j)] - cur[idx(i, j)]) / dy;
          potential += w * 0.5 * (c2[idx(i, j)] + c2[idx(i + 1, j)]) * g * g;
        }
      }
      result.energy_times_s.push_back(t);
      result.energy.push_back(kinetic + potential);

      double peak = 0.0;
      for (std::size_t k = 0; k < n; ++k) peak = std::max(peak, std::abs(next[k]));
      if (peak > kInstabilityLimit) {
        throw NumericalError("wave integration unstable (|delta| exceeded 1e6 at t=" +
                             std::to_string(t) + " s)");
      }
    }

    std::swap(prev, cur);
    std::swap(cur, next);
  }

  // Reflection guard: the run should end before a wavefront can cross to the
  // farthest boundary and travel back (estimated at the fastest local speed).
  double far_corner_km = 0.0;
  for (const double lon : {grid.lon_min, grid.lon_max}) {
    for (const double lat : {grid.lat_min, grid.lat_max}) {
      far_corner_km = std::max(
          far_corner_km, haversine_distance_km(scenario.source.location, GeoPoint{lat, lon}));
    }
  }
  result.reflection_window_ok = scenario.duration_s <= 0.8 * (2.0 * far_corner_km / c_max);

  result.traces.reserve(n_probes);
  for (std::size_t p = 0; p < n_probes; ++p) {
    PmuTrace trace;
    trace.station = scenario.probes[p];
    trace.t0_s = 0.0;
    trace.dt_s = scenario.sample_dt_s;
    trace.freq_hz = std::move(probe_freq[p]);
    for (const auto& c : scenario.corruptions) {
      if (c.station_id == trace.station.station_id) trace.t0_s += c.time_offset_s;
    }
    result.traces.push_back(std::move(trace));
  }
  return result;
}

void export_scenario_traces(const SimResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());

  std::vector<StationMeta> stations;
  stations.reserve(result.traces.size());
  for (const auto& t : result.traces) {
    const auto& id = t.station.station_id;
    if (id.find('/') != std::string::npos || id.find('\\') != std::string::npos ||
        id.find("..") != std::string::npos) {
      throw IoError("station_id '" + id + "' is not filename-safe");
    }
    stations.push_back(t.station);
  }
  {
    std::ofstream out(dir / "stations.csv");
    if (!out) throw IoError("cannot write '" + (dir / "stations.csv").string() + "'");
    write_station_metadata(out, stations);
  }
  for (const auto& t : result.traces) {
    const auto path = dir / (t.station.station_id + ".csv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_trace_csv(out, t);
  }
}

std::vector<double> uniform_h_field(const GridSpec& grid, double h) {
  grid.validate();
  return std::vector<double>(grid.node_count(), h);
}

std::vector<double> region_h_field(const GridSpec& grid, double background,
                                   std::span<const HRegion> regions) {
  grid.validate();
  std::vector<double> h(grid.node_count(), background);
  for (int i = 0; i < grid.ny; ++i) {
    for (int j = 0; j < grid.nx; ++j) {
      const GeoPoint node = grid.node(i, j);
      for (const auto& r : regions) {
        if (node.lon_deg >= r.lon_min && node.lon_deg <= r.lon_max &&
            node.lat_deg >= r.lat_min && node.lat_deg <= r.lat_max) {
          h[static_cast<std::size_t>(i) * grid.nx + j] = r.h;
        }
      }
    }
  }
  return h;
}

}  // namespace gridwave
