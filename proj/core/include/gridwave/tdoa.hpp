#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gridwave/ingest.hpp"

namespace gridwave {

/// Which side of the baseline counts as a disturbance arrival.
enum class CrossingDirection { kBelow, kAbove, kEither };

CrossingDirection direction_from_string(std::string_view s);
const char* to_string(CrossingDirection d);

struct DetectionConfig {
  double threshold_mhz = 20.0;
  double baseline_window_s = 2.0;
  CrossingDirection direction = CrossingDirection::kBelow;
};

enum class TdoaStatus { kOk, kNoCrossing, kOutlier };

TdoaStatus tdoa_status_from_string(std::string_view s);
const char* to_string(TdoaStatus s);

/// Per-station disturbance arrival, relative to the earliest-arriving
/// station of the dataset.
struct StationTdoa {
  StationMeta station;
  double tdoa_s{};
  double crossing_time_s{};
  TdoaStatus status{TdoaStatus::kOk};
};

/// Median frequency over the first baseline_window_s of the trace.
/// Throws ValidationError if the trace is shorter than the window.
double estimate_baseline(const PmuTrace& trace, const DetectionConfig& cfg);

/// Earliest time at which the deviation from baseline reaches the
/// threshold, refined by linear interpolation between the last sample
/// inside and the first sample outside. Empty if no sample ever crosses.
std::optional<double> detect_crossing(const PmuTrace& trace, double baseline_hz,
                                      const DetectionConfig& cfg);

/// Runs baseline + crossing detection per trace and references crossing
/// times to the earliest detected arrival. Stations without a crossing are
/// returned with status kNoCrossing. Throws ValidationError when fewer
/// than 4 stations have a detected crossing.
std::vector<StationTdoa> compute_tdoas(std::span<const PmuTrace> traces,
                                       const DetectionConfig& cfg);

}  // namespace gridwave
