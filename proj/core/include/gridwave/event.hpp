#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridwave/field.hpp"
#include "gridwave/interp.hpp"
#include "gridwave/tdoa.hpp"

namespace gridwave {

struct StationResidual {
  std::string station_id;
  double distance_km{};
  double tdoa_s{};
  double residual_s{};  // measured TDOA minus regression reference
};

/// Event location estimate plus the uniform-speed regression used to
/// screen station arrival times.
struct EventEstimate {
  GeoPoint location{};
  double slope_s_per_km{};  // reciprocal of the average propagation speed
  double intercept_s{};
  std::vector<StationResidual> residuals;
  std::vector<std::string> outlier_ids;
};

/// Grid node with the smallest value; ties broken by smallest latitude
/// index, then smallest longitude index. Throws if every cell is masked.
GeoPoint locate_event(const ScalarField& field);

/// Ordinary least squares of tdoa_s on great-circle distance to the event
/// for stations with status kOk. Requires >= 3 such stations and nonzero
/// distance variance.
EventEstimate regress_tdoa_distance(std::span<const StationTdoa> tdoas,
                                    const GeoPoint& event);

/// Tukey quartiles by linear interpolation of order statistics
/// (position p*(n-1), zero-indexed). Returns {Q1, Q3}.
std::pair<double, double> tukey_quartiles(std::vector<double> values);

struct RejectionResult {
  std::vector<StationTdoa> kept;
  std::vector<StationTdoa> removed;  // status set to kOutlier
};

/// Flags stations whose residual falls outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR].
/// With fewer than 4 residuals rejection is skipped and everything is kept.
RejectionResult reject_outliers(const EventEstimate& estimate,
                                std::span<const StationTdoa> tdoas);

struct ValidationResult {
  ScalarField field;
  EventEstimate estimate;          // outlier_ids accumulates across rounds
  std::vector<StationTdoa> kept;   // stations backing the final field
  int rounds = 0;                  // rejection rounds that removed something
};

/// Fit -> evaluate -> locate -> regress -> reject, re-fitting on the kept
/// stations after every removal, for at most max_rounds rejection rounds.
/// The returned field and estimate always correspond to the final kept set.
/// Throws ValidationError when the kept set drops below 4 stations.
ValidationResult validate_and_interpolate(std::span<const StationTdoa> tdoas,
                                          const GridSpec& grid, double lambda = 0.0,
                                          int max_rounds = 3);

}  // namespace gridwave
