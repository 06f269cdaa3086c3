#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "gridwave/errors.hpp"
#include "gridwave/inertia.hpp"
#include "gridwave/sim.hpp"
#include "gridwave/tdoa.hpp"
#include "support/scenarios.hpp"
#include "support/tempdir.hpp"

using namespace gridwave;
using gridwave::testing::small_scenario;
using gridwave::testing::TempDir;

TEST_CASE("local_speed: unit parameters give c^2 = 1/(2 z h)") {
  ContinuumParams p;
  p.z_mag_pu = 0.5;
  p.distance_base_km = 1.0;
  CHECK(local_speed(1.0, p) == doctest::Approx(1.0).epsilon(1e-12));
  // Quadrupling h halves the speed.
  CHECK(local_speed(4.0, p) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("scenario validation catches bad inputs") {
  SimScenario s = small_scenario(1.0);
  s.probes = {{"Q0", 35.0, -82.0}};

  SUBCASE("nonpositive h") {
    s.h_field[10] = 0.0;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("h must be positive"),
                         ValidationError);
  }
  SUBCASE("source outside grid") {
    s.source.location = {35.0, -70.0};
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("source"), ValidationError);
  }
  SUBCASE("probe outside grid") {
    s.probes.push_back({"Q1", 10.0, -82.0});
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("probes"), ValidationError);
  }
  SUBCASE("duplicate probe id") {
    s.probes.push_back({"Q0", 34.0, -82.5});
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("duplicate"), ValidationError);
  }
  SUBCASE("corruption for unknown station") {
    s.corruptions.push_back({"NOPE", 1.0});
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("unknown station_id"),
                         ValidationError);
  }
  SUBCASE("wrong h_field size") {
    s.h_field.pop_back();
    CHECK_THROWS_AS(s.validate(), ValidationError);
  }
}

TEST_CASE("simulate: wavefront arrival matches d/c on uniform inertia") {
  const SimScenario s = gridwave::testing::wavefront_scenario(1.0, 60);
  const double c = local_speed(1.0, s.params);
  const SimResult r = simulate(s);

  // Compare wavefront surface arrival against onset + d/c. The onset offset
  // is common to all nodes; fit it as the mean and bound the per-node error
  // relative to the travel time (a 10% acceptance mirror).
  const GridSpec& g = s.grid;
  const double cell_km = kKmPerDegree * g.dlat();
  std::vector<std::pair<double, double>> samples;  // (travel time, measured)
  for (int i = 0; i < g.ny; i += 2) {
    for (int j = 0; j < g.nx; j += 2) {
      if (!r.wavefront_times.is_valid(i, j)) continue;
      const double d = haversine_distance_km(s.source.location, g.node(i, j));
      if (d < 5.0 * cell_km) continue;
      samples.emplace_back(d / c, r.wavefront_times.at(i, j));
    }
  }
  REQUIRE(samples.size() > 50);
  double offset = 0.0;
  for (const auto& [travel, measured] : samples) offset += measured - travel;
  offset /= static_cast<double>(samples.size());
  for (const auto& [travel, measured] : samples) {
    CHECK(std::abs(measured - travel - offset) <= 0.10 * travel);
  }
}

TEST_CASE("simulate: equidistant lattice-aligned probes see identical traces") {
  SimScenario s = small_scenario(1.0, 41, 41, 2.0);
  // Source on the center node; probes mirrored across it on the same row.
  s.source.location = {35.0, -82.0};
  const double dlon = s.grid.dlon();
  s.probes = {{"L", 35.0, -82.0 - 10 * dlon}, {"R", 35.0, -82.0 + 10 * dlon}};
  const SimResult r = simulate(s);
  REQUIRE(r.traces.size() == 2);
  for (std::size_t k = 0; k < r.traces[0].freq_hz.size(); ++k) {
    CHECK(std::abs(r.traces[0].freq_hz[k] - r.traces[1].freq_hz[k]) <= 1e-9);
  }
}

TEST_CASE("simulate: doubling inertia stretches arrival spreads by sqrt(2)") {
  // Two probes on one ray from the source; the inter-probe arrival delay is
  // free of the common threshold-crossing lag, so the sqrt(2) law shows up
  // cleanly. Both runs share one scenario apart from the inertia map.
  SimScenario base;
  base.grid = {-94.0, -86.0, 31.0, 39.0, 60, 60};
  base.params.z_mag_pu = 0.5;
  base.params.distance_base_km = 200.0;
  base.source.location = {35.0, -90.0};
  base.source.amplitude_rad = -32.0;
  const double cell_km = kKmPerDegree * base.grid.dlat();
  const double c_slow = local_speed(2.0, base.params);
  base.source.sigma_deg = base.grid.dlat();
  base.source.sigma_t_s = 2.0 * cell_km / c_slow;
  base.source.t_center_s = std::max(0.5, 5.0 * base.source.sigma_t_s);
  base.duration_s = 7.0;
  base.sample_dt_s = 0.02;
  base.probes = {{"NEAR", 35.7, -89.0}, {"FAR", 38.0, -86.6}};

  DetectionConfig det;
  det.threshold_mhz = 5.0;
  det.baseline_window_s = 0.4;

  double delay[2] = {0.0, 0.0};
  int idx = 0;
  for (const double h : {1.0, 2.0}) {
    SimScenario s = base;
    s.h_field = uniform_h_field(s.grid, h);
    const SimResult r = simulate(s);
    const auto near = detect_crossing(r.traces[0], estimate_baseline(r.traces[0], det), det);
    const auto far = detect_crossing(r.traces[1], estimate_baseline(r.traces[1], det), det);
    REQUIRE(near.has_value());
    REQUIRE(far.has_value());
    delay[idx++] = *far - *near;
  }
  const double ratio = delay[1] / delay[0];
  CHECK(std::abs(ratio - std::numbers::sqrt2) <= 0.05 * std::numbers::sqrt2);
}

TEST_CASE("simulate: energy is flat after injection") {
  SimScenario s = small_scenario(1.0, 40, 40, 2.5);
  const SimResult r = simulate(s);
  const double injected_until = s.source.resolved_t_center_s() + 5.0 * s.source.sigma_t_s;
  double reference = -1.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < r.energy.size(); ++k) {
    if (r.energy_times_s[k] < injected_until) continue;
    if (reference < 0.0) reference = r.energy[k];
    worst = std::max(worst, std::abs(r.energy[k] / reference - 1.0));
  }
  REQUIRE(reference > 0.0);
  CHECK(worst <= 0.05);
}

TEST_CASE("simulate: reruns are bit-identical") {
  SimScenario s = small_scenario(1.3, 40, 40, 2.0);
  s.probes = {{"Q0", 36.0, -81.0}, {"Q1", 34.2, -83.1}};
  const SimResult a = simulate(s);
  const SimResult b = simulate(s);
  CHECK(a.cfl_dt_s == b.cfl_dt_s);
  CHECK(gridwave::testing::fields_identical(a.wavefront_times.values(),
                                            b.wavefront_times.values()));
  for (std::size_t p = 0; p < a.traces.size(); ++p) {
    CHECK(a.traces[p].freq_hz == b.traces[p].freq_hz);
  }
  CHECK(a.energy == b.energy);
}

TEST_CASE("simulate: corruption shifts only the tagged station's clock") {
  SimScenario s = small_scenario(1.0, 40, 40, 2.0);
  s.probes = {{"Q0", 36.0, -81.0}, {"Q1", 34.2, -83.1}};
  s.corruptions = {{"Q1", 1.5}};
  const SimResult r = simulate(s);
  CHECK(r.traces[0].t0_s == 0.0);
  CHECK(r.traces[1].t0_s == 1.5);
  CHECK(r.traces[0].freq_hz.size() == r.traces[1].freq_hz.size());
}

TEST_CASE("simulate: ground-truth wavefront inverts back to the true speed map") {
  const double h = 1.0;
  const SimScenario s = gridwave::testing::wavefront_scenario(h, 48);
  const SimResult r = simulate(s);
  const double c_true = local_speed(h, s.params);
  const ScalarField speed = speed_field(gradient_field(r.wavefront_times));
  const int si = static_cast<int>(std::lround(
      (s.source.location.lat_deg - s.grid.lat_min) / s.grid.dlat()));
  const int sj = static_cast<int>(std::lround(
      (s.source.location.lon_deg - s.grid.lon_min) / s.grid.dlon()));
  int checked = 0;
  for (int i = 5; i + 5 < s.grid.ny; ++i) {
    for (int j = 5; j + 5 < s.grid.nx; ++j) {
      if (std::abs(i - si) < 5 && std::abs(j - sj) < 5) continue;
      if (!speed.is_valid(i, j)) continue;
      ++checked;
      CHECK(std::abs(speed.at(i, j) / c_true - 1.0) <= 0.10);
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("export: one metadata file plus one trace per probe, parse round trip") {
  SimScenario s = small_scenario(1.0, 30, 30, 1.5);
  s.probes = {{"Q0", 36.0, -81.0}, {"Q1", 34.2, -83.1}, {"Q2", 35.5, -82.6}};
  const SimResult r = simulate(s);
  TempDir dir;
  export_scenario_traces(r, dir.path);

  std::ifstream stations_in(dir.path / "stations.csv");
  const auto stations = parse_station_metadata(stations_in);
  REQUIRE(stations.size() == 3);

  int trace_files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir.path)) {
    if (entry.path().filename() != "stations.csv") ++trace_files;
  }
  CHECK(trace_files == 3);

  for (std::size_t p = 0; p < r.traces.size(); ++p) {
    std::ifstream in(dir.path / (r.traces[p].station.station_id + ".csv"));
    const PmuTrace back = parse_trace_csv(in, r.traces[p].station);
    CHECK(back.t0_s == r.traces[p].t0_s);
    CHECK(std::abs(back.dt_s - r.traces[p].dt_s) <= 1e-9 * r.traces[p].dt_s);
    REQUIRE(back.freq_hz.size() == r.traces[p].freq_hz.size());
    for (std::size_t k = 0; k < back.freq_hz.size(); ++k) {
      CHECK(back.freq_hz[k] == r.traces[p].freq_hz[k]);
    }
  }
}

TEST_CASE("export: empty probe list writes only the metadata header") {
  SimScenario s = small_scenario(1.0, 25, 25, 1.0);
  const SimResult r = simulate(s);
  TempDir dir;
  export_scenario_traces(r, dir.path);
  std::ifstream in(dir.path / "stations.csv");
  const auto stations = parse_station_metadata(in);
  CHECK(stations.empty());
  int files = 0;
  for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir.path)) {
    ++files;
  }
  CHECK(files == 1);
}

TEST_CASE("scenario JSON: uniform, regions and nested-array inertia forms") {
  const std::string base = R"({
    "grid": {"lon_min": -84, "lon_max": -80, "lat_min": 33, "lat_max": 37, "nx": 5, "ny": 4},
    "params": {"z_mag_pu": 0.5, "distance_base_km": 200},
    "source": {"lat_deg": 35, "lon_deg": -82, "sigma_t_s": 0.1, "sigma_deg": 0.3},
    "probes": [{"station_id": "Q0", "lat_deg": 35, "lon_deg": -82}],
    "duration_s": 2.0,
    "sample_dt_s": 0.05,
    "h_field": )";

  SUBCASE("plain number") {
    const SimScenario s = parse_scenario_json(base + "2.5}");
    CHECK(s.h_field == uniform_h_field(s.grid, 2.5));
  }
  SUBCASE("uniform object") {
    const SimScenario s = parse_scenario_json(base + R"({"uniform": 1.5}})");
    CHECK(s.h_field == uniform_h_field(s.grid, 1.5));
  }
  SUBCASE("regions override the background") {
    const SimScenario s = parse_scenario_json(
        base +
        R"({"background": 1.0,
            "regions": [{"lon_min": -82, "lon_max": -80, "lat_min": 33, "lat_max": 37, "h": 4.0}]}})");
    CHECK(s.h_field[0] == 1.0);                       // west edge
    CHECK(s.h_field[s.grid.nx - 1] == 4.0);           // east edge
  }
  SUBCASE("nested array") {
    std::string rows = "[";
    for (int i = 0; i < 4; ++i) {
      rows += (i ? "," : "");
      rows += "[1,2,3,4,5]";
    }
    rows += "]}";
    const SimScenario s = parse_scenario_json(base + rows);
    CHECK(s.h_field[0] == 1.0);
    CHECK(s.h_field[4] == 5.0);
  }
  SUBCASE("malformed h_field is named in the error") {
    CHECK_THROWS_WITH_AS(parse_scenario_json(base + R"("nope"})"),
                         doctest::Contains("h_field"), ValidationError);
  }
}

TEST_CASE("scenario JSON: optional threshold and corruptions plumb through") {
  const std::string text = R"({
    "grid": {"lon_min": -84, "lon_max": -80, "lat_min": 33, "lat_max": 37, "nx": 5, "ny": 4},
    "h_field": 1.0,
    "source": {"lat_deg": 35, "lon_deg": -82},
    "probes": [{"station_id": "Q0", "lat_deg": 35, "lon_deg": -82}],
    "duration_s": 2.0,
    "sample_dt_s": 0.05,
    "wavefront_threshold_mhz": 2.5,
    "corruptions": [{"station_id": "Q0", "time_offset_s": -0.25}]
  })";
  const SimScenario s = parse_scenario_json(text);
  CHECK(s.wavefront_threshold_mhz == 2.5);
  REQUIRE(s.corruptions.size() == 1);
  CHECK(s.corruptions[0].station_id == "Q0");
  CHECK(s.corruptions[0].time_offset_s == -0.25);
}

TEST_CASE("scenario JSON: missing required fields are named") {
  CHECK_THROWS_WITH_AS(parse_scenario_json("{}"), doctest::Contains("grid"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(parse_scenario_json("not json"), doctest::Contains("scenario JSON"),
                       ParseError);
}

TEST_CASE("simulate: reflection window flag reports overlong runs") {
  SimScenario s = small_scenario(1.0, 30, 30, 1.0);
  CHECK(simulate(s).reflection_window_ok);
  s.duration_s = 12.0;  // several crossings of the domain
  CHECK_FALSE(simulate(s).reflection_window_ok);
}

TEST_CASE("simulate: refuses configurations whose CFL step count explodes") {
  // h ~ 1e-12 drives c to ~1e6 km/s and dt to sub-microseconds.
  SimScenario s = small_scenario(1.0, 12, 12, 30.0);
  s.h_field = uniform_h_field(s.grid, 1e-12);
  CHECK_THROWS_WITH_AS(simulate(s), doctest::Contains("integration steps"),
                       ValidationError);
}
