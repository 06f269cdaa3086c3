#include "gridwave/event.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gridwave/errors.hpp"

namespace gridwave {

GeoPoint locate_event(const ScalarField& field) {
  const GridSpec& grid = field.grid();
  int best_i = -1;
  int best_j = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.ny; ++i) {
    for (int j = 0; j < grid.nx; ++j) {
      if (!field.is_valid(i, j)) continue;
      const double v = field.at(i, j);
      if (v < best) {
        best = v;
        best_i = i;
        best_j = j;
      }
    }
  }
  if (best_i < 0) throw ValidationError("cannot locate event: field has no valid cells");
  return grid.node(best_i, best_j);
}

EventEstimate regress_tdoa_distance(std::span<const StationTdoa> tdoas,
                                    const GeoPoint& event) {
  std::vector<const StationTdoa*> ok;
  for (const auto& t : tdoas) {
    if (t.status == TdoaStatus::kOk) ok.push_back(&t);
  }
  if (ok.size() < 3) {
    throw ValidationError("regression requires at least 3 ok stations, got " +
                          std::to_string(ok.size()));
  }
  const std::size_t n = ok.size();
  std::vector<double> dist(n);
  double mean_d = 0.0;
  double mean_t = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    dist[k] = haversine_distance_km(event, ok[k]->station.location());
    mean_d += dist[k];
    mean_t += ok[k]->tdoa_s;
  }
  mean_d /= static_cast<double>(n);
  mean_t /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dd = dist[k] - mean_d;
    sxx += dd * dd;
    sxy += dd * (ok[k]->tdoa_s - mean_t);
    scale += dist[k] * dist[k];
  }
  if (sxx <= 1e-12 * (scale + 1.0)) {
    throw NumericalError(
        "degenerate regression: stations are equidistant from the event location");
  }
  EventEstimate est;
  est.location = event;
  est.slope_s_per_km = sxy / sxx;
  est.intercept_s = mean_t - est.slope_s_per_km * mean_d;
  est.residuals.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double reference = est.slope_s_per_km * dist[k] + est.intercept_s;
    est.residuals.push_back({ok[k]->station.station_id, dist[k], ok[k]->tdoa_s,
                             ok[k]->tdoa_s - reference});
  }
  return est;
}

std::pair<double, double> tukey_quartiles(std::vector<double> values) {
  if (values.empty()) throw ValidationError("quartiles of empty set");
  std::sort(values.begin(), values.end());
  const auto at = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.75)};
}

RejectionResult reject_outliers(const EventEstimate& estimate,
                                std::span<const StationTdoa> tdoas) {
  RejectionResult result;
  std::vector<double> residuals;
  residuals.reserve(estimate.residuals.size());
  for (const auto& r : estimate.residuals) residuals.push_back(r.residual_s);

  const auto residual_for = [&](const std::string& id) -> const StationResidual* {
    for (const auto& r : estimate.residuals) {
      if (r.station_id == id) return &r;
    }
    return nullptr;
  };

  if (residuals.size() < 4) {
    // Too few points for meaningful quartiles; keep everything.
    result.kept.assign(tdoas.begin(), tdoas.end());
    return result;
  }
  const auto [q1, q3] = tukey_quartiles(residuals);
  const double iqr = q3 - q1;
  // Sub-nanosecond slack so that roundoff-scale residual scatter (exact
  // affine data) is never flagged; far below any physical timing spread.
  const double slack = 1e-9;
  const double lo = q1 - 1.5 * iqr - slack;
  const double hi = q3 + 1.5 * iqr + slack;
  for (const auto& t : tdoas) {
    if (t.status != TdoaStatus::kOk) {
      result.kept.push_back(t);
      continue;
    }
    const StationResidual* r = residual_for(t.station.station_id);
    if (r == nullptr) {
      throw ValidationError("no residual available for station '" +
                            t.station.station_id + "'");
    }
    if (r->residual_s < lo || r->residual_s > hi) {
      StationTdoa out = t;
      out.status = TdoaStatus::kOutlier;
      result.removed.push_back(std::move(out));
    } else {
      result.kept.push_back(t);
    }
  }
  return result;
}

ValidationResult validate_and_interpolate(std::span<const StationTdoa> tdoas,
                                          const GridSpec& grid, double lambda,
                                          int max_rounds) {
  grid.validate();
  if (max_rounds < 0) throw ValidationError("max_rounds must be >= 0");

  std::vector<StationTdoa> kept;
  for (const auto& t : tdoas) {
    if (t.status == TdoaStatus::kOk) kept.push_back(t);
  }
  if (kept.size() < 4) {
    throw ValidationError("validation requires at least 4 ok stations, got " +
                          std::to_string(kept.size()));
  }

  ValidationResult result;
  std::vector<std::string> outliers;
  for (int round = 0;; ++round) {
    std::vector<GeoPoint> points;
    std::vector<double> values;
    points.reserve(kept.size());
    values.reserve(kept.size());
    for (const auto& t : kept) {
      points.push_back(t.station.location());
      values.push_back(t.tdoa_s);
    }
    const SplineModel model = fit_biharmonic_spline(points, values, lambda);
    result.field = evaluate_on_grid(model, grid);
    const GeoPoint event = locate_event(result.field);
    result.estimate = regress_tdoa_distance(kept, event);
    if (round == max_rounds) break;
    auto rejection = reject_outliers(result.estimate, kept);
    if (rejection.removed.empty()) break;
    for (const auto& r : rejection.removed) outliers.push_back(r.station.station_id);
    kept = std::move(rejection.kept);
    result.rounds = round + 1;
    if (kept.size() < 4) {
      throw ValidationError("too many outliers: only " + std::to_string(kept.size()) +
                            " stations left after rejection");
    }
  }
  result.estimate.outlier_ids = std::move(outliers);
  result.kept = std::move(kept);
  return result;
}

}  // namespace gridwave
