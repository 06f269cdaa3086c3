#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridwave/event.hpp"
#include "gridwave/field.hpp"
#include "gridwave/tdoa.hpp"

namespace gridwave {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Provenance block attached to the JSON form of derived fields.
struct FieldMetadata {
  std::string units;
  std::vector<std::pair<std::string, double>> params;
  std::size_t masked_nodes = 0;
  bool edge_one_sided = false;  // edge nodes carry one-sided differences
};

/// Grid CSV: header row of longitudes, first column of latitudes, values
/// in row-major order. Masked cells serialize as empty strings.
void write_field_csv(std::ostream& out, const ScalarField& field);
ScalarField read_field_csv(std::istream& in);

/// JSON variant: grid spec, units, flat row-major value array (null for
/// masked cells) and an optional metadata block.
std::string field_to_json(const ScalarField& field, const std::string& units,
                          const FieldMetadata* metadata = nullptr);
ScalarField field_from_json(std::string_view text);

/// Per-station TDOA table:
/// station_id,lat_deg,lon_deg,crossing_time_s,tdoa_s,status
void write_tdoa_table(std::ostream& out, std::span<const StationTdoa> tdoas);
std::vector<StationTdoa> read_tdoa_table(std::istream& in);

std::string event_to_json(const EventEstimate& estimate);

}  // namespace gridwave
