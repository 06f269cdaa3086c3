// Acceptance suite: one test case per acceptance criterion. Each prints a
// single [criterion N] PASS/FAIL line with the measured quantities, then
// asserts. Run via `ctest -R acceptance` or directly with `-s`.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridwave/event.hpp"
#include "gridwave/inertia.hpp"
#include "gridwave/interp.hpp"
#include "gridwave/io.hpp"
#include "gridwave/sim.hpp"
#include "gridwave/tdoa.hpp"
#include "support/oracles.hpp"
#include "support/properties.hpp"
#include "support/random.hpp"
#include "support/run_cli.hpp"
#include "support/scenarios.hpp"
#include "support/tempdir.hpp"

using namespace gridwave;
using namespace gridwave::testing;
using nlohmann::json;

namespace {

const std::string kScenarioDir = GRIDWAVE_SCENARIO_DIR;

void report(int criterion, const char* label, bool pass, const std::string& detail) {
  std::printf("[criterion %d] %-32s %s (%s)\n", criterion, label,
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return json::parse(in);
}

}  // namespace

TEST_CASE("criterion 1: interpolation exactness and speed") {
  Rng rng(101);
  const auto pts = rng.separated_points(50, -100, -80, 30, 45, 0.05);
  std::vector<double> vals(50);
  for (auto& v : vals) v = rng.uniform(0.0, 1.0);

  const auto t0 = std::chrono::steady_clock::now();
  const SplineModel model = fit_biharmonic_spline(pts, vals, 0.0);
  const GridSpec grid{-100, -80, 30, 45, 101, 101};
  const ScalarField surface = evaluate_on_grid(model, grid);
  const double elapsed = seconds_since(t0);

  double max_err = 0.0;
  for (int k = 0; k < 50; ++k) {
    max_err = std::max(max_err, std::abs(evaluate_spline(model, pts[k]) - vals[k]));
  }
  std::size_t finite = grid.node_count() - surface.masked_count();

  const bool pass = max_err <= 1e-6 && elapsed < 2.0 && finite == grid.node_count();
  report(1, "interpolation exactness", pass,
         "max reproduction err " + format_double(max_err) + " s, fit+eval " +
             format_double(elapsed) + " s");
  CHECK(max_err <= 1e-6);
  CHECK(elapsed < 2.0);
  CHECK(finite == grid.node_count());
}

TEST_CASE("criterion 2: solver matches the elimination oracle") {
  double worst = 0.0;
  for (const int n : {5, 20, 100}) {
    Rng rng(200 + n);
    const auto pts = rng.separated_points(n, -100, -80, 30, 45, 0.05);
    std::vector<double> vals(n);
    for (auto& v : vals) v = rng.uniform(0.0, 1.0);
    const SplineModel model = fit_biharmonic_spline(pts, vals, 0.0);

    std::vector<std::vector<double>> green(n, std::vector<double>(n));
    std::vector<double> resid(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        green[i][j] = biharmonic_green(std::hypot(pts[i].lon_deg - pts[j].lon_deg,
                                                  pts[i].lat_deg - pts[j].lat_deg));
      }
      resid[i] = vals[i] - (model.trend[0] + model.trend[1] * pts[i].lon_deg +
                            model.trend[2] * pts[i].lat_deg);
    }
    const auto oracle = gauss_solve(green, resid);
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
      diff = std::max(diff, std::abs(oracle[i] - model.weights[i]));
      scale = std::max(scale, std::abs(oracle[i]));
    }
    worst = std::max(worst, diff / scale);
  }
  const bool pass = worst <= 1e-8;
  report(2, "solver oracle equivalence", pass,
         "worst relative weight difference " + format_double(worst) +
             " over N in {5,20,100}");
  CHECK(worst <= 1e-8);
}

TEST_CASE("criterion 3: affine TDOA field round-trips through speed") {
  const double a = 0.01;   // s per degree longitude
  const double b = 0.02;   // s per degree latitude
  Rng rng(303);
  const auto pts = rng.separated_points(20, -100, -80, 30, 45, 0.3);
  std::vector<double> vals(20);
  for (int k = 0; k < 20; ++k) vals[k] = a * pts[k].lon_deg + b * pts[k].lat_deg;

  const SplineModel model = fit_biharmonic_spline(pts, vals, 0.0);
  const GridSpec grid{-100, -80, 30, 45, 41, 41};
  const ScalarField surface = evaluate_on_grid(model, grid);
  const ScalarField speed = speed_field(gradient_field(surface));

  double worst = 0.0;
  for (int i = 1; i + 1 < grid.ny; ++i) {
    const auto coeff = degree_coefficients(grid.node(i, 0));
    const double slowness = std::hypot(a / coeff.c_lon_km_per_deg, b / coeff.c_lat_km_per_deg);
    const double expected = 1.0 / slowness;
    for (int j = 1; j + 1 < grid.nx; ++j) {
      REQUIRE(speed.is_valid(i, j));
      worst = std::max(worst, std::abs(speed.at(i, j) / expected - 1.0));
    }
  }
  const bool pass = worst <= 0.01;
  report(3, "affine field round trip", pass,
         "worst interior speed error " + format_double(100.0 * worst) + "%");
  CHECK(worst <= 0.01);
}

TEST_CASE("criterion 4: uniform-inertia inverse recovery via pipeline") {
  TempDir dir("accept4");
  const auto t0 = std::chrono::steady_clock::now();
  const CliResult r =
      run_cli("pipeline --scenario " + kScenarioDir + "/uniform.json --out " +
              (dir / "run").string() + " --threshold-mhz 10");
  const double elapsed = seconds_since(t0);
  CAPTURE(r.output);
  REQUIRE(r.exit_code == 0);

  const json report_doc = load_json(dir / "run" / "comparison_report.json");
  const auto& region = report_doc["regions"][0];
  const double v_rec = region["speed_recovered_median"].get<double>();
  const double v_true = region["speed_true_median"].get<double>();
  const double h_ratio = region["h_ratio_recovered_over_true"].get<double>();
  const double v_err = std::abs(v_rec / v_true - 1.0);
  const double h_err = std::abs(h_ratio - 1.0);

  const bool pass = v_err <= 0.10 && h_err <= 0.20 && elapsed < 60.0;
  report(4, "uniform inverse recovery", pass,
         "median speed err " + format_double(100 * v_err) + "%, median h err " +
             format_double(100 * h_err) + "%, runtime " + format_double(elapsed) + " s");
  CHECK(v_err <= 0.10);
  CHECK(h_err <= 0.20);
  CHECK(elapsed < 60.0);
}

TEST_CASE("criterion 5: inertia-change detection across regions") {
  TempDir dir("accept5");

  // Two-region scenario: east box h = 4, background h = 1.
  const CliResult two =
      run_cli("pipeline --scenario " + kScenarioDir + "/two_region.json --out " +
              (dir / "two").string() + " --threshold-mhz 10");
  CAPTURE(two.output);
  REQUIRE(two.exit_code == 0);
  const json report_doc = load_json(dir / "two" / "comparison_report.json");
  double h_east = 0, h_west = 0, v_east = 0, v_west = 0;
  for (const auto& region : report_doc["regions"]) {
    if (region["name"] == "region1") {
      h_east = region["h_recovered_median"].get<double>();
      v_east = region["speed_recovered_median"].get<double>();
    } else {
      h_west = region["h_recovered_median"].get<double>();
      v_west = region["speed_recovered_median"].get<double>();
    }
  }
  const double ratio = h_east / h_west;
  const double ratio_err = std::abs(ratio - 4.0) / 4.0;
  const bool order_ok = v_west > v_east;  // lower-h region propagates faster

  // Doubled-inertia rerun of the uniform scenario.
  json scn = load_json(kScenarioDir + "/uniform.json");
  scn["h_field"] = {{"uniform", 2.0}};
  scn["duration_s"] = 11.0;
  {
    std::ofstream out(dir / "uniform_h2.json");
    out << scn.dump(2);
  }
  const CliResult base =
      run_cli("pipeline --scenario " + kScenarioDir + "/uniform.json --out " +
              (dir / "h1").string() + " --threshold-mhz 10");
  const CliResult doubled =
      run_cli("pipeline --scenario " + (dir / "uniform_h2.json").string() + " --out " +
              (dir / "h2").string() + " --threshold-mhz 10");
  REQUIRE(base.exit_code == 0);
  REQUIRE(doubled.exit_code == 0);
  const double v1 = load_json(dir / "h1" / "comparison_report.json")["regions"][0]
                        ["speed_recovered_median"].get<double>();
  const double v2 = load_json(dir / "h2" / "comparison_report.json")["regions"][0]
                        ["speed_recovered_median"].get<double>();
  const double speed_ratio = v2 / v1;
  const double expect = 1.0 / std::numbers::sqrt2;
  const double speed_ratio_err = std::abs(speed_ratio / expect - 1.0);

  const bool pass = ratio_err <= 0.30 && order_ok && speed_ratio_err <= 0.10;
  report(5, "inertia-change detection", pass,
         "region h ratio " + format_double(ratio) + " (err " +
             format_double(100 * ratio_err) + "%), ordering " +
             (order_ok ? "ok" : "violated") + ", doubled-h speed ratio " +
             format_double(speed_ratio) + " (err " + format_double(100 * speed_ratio_err) +
             "%)");
  CHECK(ratio_err <= 0.30);
  CHECK(order_ok);
  CHECK(speed_ratio_err <= 0.10);
}

TEST_CASE("criterion 6: outlier rejection under a corrupted clock") {
  TempDir dir("accept6");
  const CliResult corrupted =
      run_cli("pipeline --scenario " + kScenarioDir + "/uniform_corrupt.json --out " +
              (dir / "bad").string() + " --threshold-mhz 10 --lambda 3 --format json");
  CAPTURE(corrupted.output);
  REQUIRE(corrupted.exit_code == 0);

  // Clean twin: the same scenario without the corruption entry.
  json scn = load_json(kScenarioDir + "/uniform_corrupt.json");
  scn.erase("corruptions");
  {
    std::ofstream out(dir / "clean.json");
    out << scn.dump(2);
  }
  const CliResult clean =
      run_cli("pipeline --scenario " + (dir / "clean.json").string() + " --out " +
              (dir / "good").string() + " --threshold-mhz 10 --lambda 3 --format json");
  REQUIRE(clean.exit_code == 0);

  const json report_doc = load_json(dir / "bad" / "comparison_report.json");
  bool flagged = false;
  for (const auto& id : report_doc["outliers_detected"]) {
    flagged = flagged || id.get<std::string>() == "P07";
  }

  const ScalarField h_bad =
      field_from_json(slurp_file(dir / "bad" / "inertia_field.json"));
  const ScalarField h_good =
      field_from_json(slurp_file(dir / "good" / "inertia_field.json"));
  REQUIRE(h_bad.grid().nx == h_good.grid().nx);
  double num = 0.0, den = 0.0;
  int shared = 0;
  for (int i = 1; i + 1 < h_bad.grid().ny; ++i) {
    for (int j = 1; j + 1 < h_bad.grid().nx; ++j) {
      if (!h_bad.is_valid(i, j) || !h_good.is_valid(i, j)) continue;
      const double d = h_bad.at(i, j) - h_good.at(i, j);
      num += d * d;
      den += h_good.at(i, j) * h_good.at(i, j);
      ++shared;
    }
  }
  REQUIRE(shared > 100);
  const double rms = std::sqrt(num / den);

  const bool pass = flagged && rms <= 0.05;
  report(6, "outlier rejection", pass,
         std::string("corrupted station ") + (flagged ? "flagged" : "NOT flagged") +
             ", inertia RMS diff vs clean run " + format_double(100 * rms) + "%");
  CHECK(flagged);
  CHECK(rms <= 0.05);
}

TEST_CASE("criterion 7: forward/inverse algebraic consistency") {
  ContinuumParams params;
  params.z_mag_pu = 0.5;
  params.distance_base_km = 500.0;
  double worst = 0.0;
  for (const double h : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const double back = inertia_from_speed_kms(local_speed(h, params), params);
    worst = std::max(worst, std::abs(back - h) / h);
  }
  const bool pass = worst <= 1e-12;
  report(7, "forward/inverse consistency", pass,
         "worst relative error " + format_double(worst));
  CHECK(worst <= 1e-12);
}

TEST_CASE("criterion 8: simulator sanity") {
  const SimScenario scenario = load_scenario(kScenarioDir + "/uniform.json");
  const SimResult run1 = simulate(scenario);
  const SimResult run2 = simulate(scenario);

  // Trace-detected arrival vs d/c at probes >= 5 cells from the source,
  // with the common onset offset fitted out.
  DetectionConfig det;
  det.threshold_mhz = 10.0;
  const double c = local_speed(1.0, scenario.params);
  const double cell_km = kKmPerDegree * scenario.grid.dlat();
  std::vector<std::pair<double, double>> samples;
  for (const auto& trace : run1.traces) {
    const double d =
        haversine_distance_km(scenario.source.location, trace.station.location());
    if (d < 5.0 * cell_km) continue;
    const auto crossing = detect_crossing(trace, estimate_baseline(trace, det), det);
    REQUIRE(crossing.has_value());
    samples.emplace_back(d / c, *crossing);
  }
  REQUIRE(samples.size() >= 25);
  double offset = 0.0;
  for (const auto& [travel, measured] : samples) offset += measured - travel;
  offset /= static_cast<double>(samples.size());
  double worst_arrival = 0.0;
  for (const auto& [travel, measured] : samples) {
    worst_arrival = std::max(worst_arrival, std::abs(measured - travel - offset) / travel);
  }

  const double injected_until =
      scenario.source.resolved_t_center_s() + 5.0 * scenario.source.sigma_t_s;
  double reference = -1.0;
  double worst_drift = 0.0;
  for (std::size_t k = 0; k < run1.energy.size(); ++k) {
    if (run1.energy_times_s[k] < injected_until) continue;
    if (reference < 0.0) reference = run1.energy[k];
    worst_drift = std::max(worst_drift, std::abs(run1.energy[k] / reference - 1.0));
  }

  bool identical = fields_identical(run1.wavefront_times.values(),
                                    run2.wavefront_times.values()) &&
                   run1.energy == run2.energy;
  for (std::size_t p = 0; p < run1.traces.size(); ++p) {
    identical = identical && run1.traces[p].freq_hz == run2.traces[p].freq_hz;
  }

  const bool pass = worst_arrival <= 0.10 && worst_drift <= 0.05 && identical;
  report(8, "simulator sanity", pass,
         "worst arrival err " + format_double(100 * worst_arrival) + "%, energy drift " +
             format_double(100 * worst_drift) + "%, reruns " +
             (identical ? "bit-identical" : "DIFFER"));
  CHECK(worst_arrival <= 0.10);
  CHECK(worst_drift <= 0.05);
  CHECK(identical);
}

TEST_CASE("criterion 9: invariant property battery") {
  int failures = 0;
  for (const auto& property : all_property_cases()) {
    const auto failure = run_property(property);
    std::printf("  - %-34s %4d cases %s%s\n", property.name.c_str(), property.cases,
                failure ? "FAIL: " : "pass", failure ? failure->c_str() : "");
    if (failure) ++failures;
    CHECK_MESSAGE(!failure.has_value(), property.name, ": ", failure.value_or(""));
  }
  const bool pass = failures == 0;
  report(9, "invariant property battery", pass,
         std::to_string(all_property_cases().size() - failures) + "/" +
             std::to_string(all_property_cases().size()) + " properties passing");
  CHECK(failures == 0);
}
