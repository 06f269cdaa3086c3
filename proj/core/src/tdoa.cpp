#include "gridwave/tdoa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gridwave/errors.hpp"
#include "gridwave/field.hpp"

namespace gridwave {

CrossingDirection direction_from_string(std::string_view s) {
  if (s == "below") return CrossingDirection::kBelow;
  if (s == "above") return CrossingDirection::kAbove;
  if (s == "either") return CrossingDirection::kEither;
  throw ValidationError("unknown crossing direction '" + std::string(s) +
                        "' (expected below|above|either)");
}

const char* to_string(CrossingDirection d) {
  switch (d) {
    case CrossingDirection::kBelow: return "below";
    case CrossingDirection::kAbove: return "above";
    case CrossingDirection::kEither: return "either";
  }
  return "?";
}

TdoaStatus tdoa_status_from_string(std::string_view s) {
  if (s == "ok") return TdoaStatus::kOk;
  if (s == "no_crossing") return TdoaStatus::kNoCrossing;
  if (s == "outlier") return TdoaStatus::kOutlier;
  throw ValidationError("unknown tdoa status '" + std::string(s) + "'");
}

const char* to_string(TdoaStatus s) {
  switch (s) {
    case TdoaStatus::kOk: return "ok";
    case TdoaStatus::kNoCrossing: return "no_crossing";
    case TdoaStatus::kOutlier: return "outlier";
  }
  return "?";
}

namespace {

void check_config(const DetectionConfig& cfg) {
  if (!(cfg.threshold_mhz > 0.0)) throw ValidationError("threshold_mhz must be > 0");
  if (!(cfg.baseline_window_s > 0.0)) throw ValidationError("baseline_window_s must be > 0");
}

}  // namespace

double estimate_baseline(const PmuTrace& trace, const DetectionConfig& cfg) {
  check_config(cfg);
  if (trace.duration_s() + 1e-9 * trace.dt_s < cfg.baseline_window_s) {
    throw ValidationError("trace for station '" + trace.station.station_id +
                          "' is shorter than the baseline window");
  }
  // Samples with offset k*dt strictly inside the window.
  std::vector<double> window;
  for (std::size_t k = 0; k < trace.freq_hz.size(); ++k) {
    if (static_cast<double>(k) * trace.dt_s >= cfg.baseline_window_s) break;
    window.push_back(trace.freq_hz[k]);
  }
  const std::size_t mid = window.size() / 2;
  std::nth_element(window.begin(), window.begin() + mid, window.end());
  double median = window[mid];
  if (window.size() % 2 == 0) {
    const double lower = *std::max_element(window.begin(), window.begin() + mid);
    median = 0.5 * (lower + median);
  }
  return median;
}

std::optional<double> detect_crossing(const PmuTrace& trace, double baseline_hz,
                                      const DetectionConfig& cfg) {
  check_config(cfg);
  if (!std::isfinite(baseline_hz)) throw ValidationError("baseline must be finite");
  const double threshold_hz = cfg.threshold_mhz * 1e-3;
  const auto beyond = [&](double deviation) {
    switch (cfg.direction) {
      case CrossingDirection::kBelow: return deviation <= -threshold_hz;
      case CrossingDirection::kAbove: return deviation >= threshold_hz;
      case CrossingDirection::kEither: return std::abs(deviation) >= threshold_hz;
    }
    return false;
  };
  for (std::size_t k = 0; k < trace.freq_hz.size(); ++k) {
    const double dev = trace.freq_hz[k] - baseline_hz;
    if (!beyond(dev)) continue;
    if (k == 0) return trace.t0_s;
    // Refine between the last inside sample and this one.
    const double prev = trace.freq_hz[k - 1] - baseline_hz;
    const double target = dev >= 0.0 ? threshold_hz : -threshold_hz;
    const double frac = (target - prev) / (dev - prev);
    return trace.time_at(k - 1) + frac * trace.dt_s;
  }
  return std::nullopt;
}

std::vector<StationTdoa> compute_tdoas(std::span<const PmuTrace> traces,
                                       const DetectionConfig& cfg) {
  check_config(cfg);
  std::vector<StationTdoa> result;
  result.reserve(traces.size());
  int detected = 0;
  double min_crossing = std::numeric_limits<double>::infinity();
  for (const auto& trace : traces) {
    StationTdoa entry;
    entry.station = trace.station;
    const double baseline = estimate_baseline(trace, cfg);
    const auto crossing = detect_crossing(trace, baseline, cfg);
    if (crossing) {
      entry.status = TdoaStatus::kOk;
      entry.crossing_time_s = *crossing;
      ++detected;
      min_crossing = std::min(min_crossing, *crossing);
    } else {
      entry.status = TdoaStatus::kNoCrossing;
      entry.crossing_time_s = kInvalidValue;
      entry.tdoa_s = kInvalidValue;
    }
    result.push_back(std::move(entry));
  }
  if (detected < 4) {
    throw ValidationError("insufficient detected crossings: need at least 4 stations, got " +
                          std::to_string(detected));
  }
  for (auto& entry : result) {
    if (entry.status == TdoaStatus::kOk) {
      entry.tdoa_s = entry.crossing_time_s - min_crossing;
    }
  }
  return result;
}

}  // namespace gridwave
