#include "gridwave/field.hpp"

#include <algorithm>
#include <string>

#include "gridwave/errors.hpp"

namespace gridwave {

void GridSpec::validate() const {
  if (!std::isfinite(lon_min) || !std::isfinite(lon_max) || !std::isfinite(lat_min) ||
      !std::isfinite(lat_max)) {
    throw ValidationError("grid bounds must be finite");
  }
  if (!(lon_min < lon_max)) {
    throw ValidationError("grid requires lon_min < lon_max");
  }
  if (!(lat_min < lat_max)) {
    throw ValidationError("grid requires lat_min < lat_max");
  }
  if (nx < 2 || ny < 2) {
    throw ValidationError("grid requires nx >= 2 and ny >= 2, got nx=" +
                          std::to_string(nx) + " ny=" + std::to_string(ny));
  }
}

ScalarField::ScalarField(const GridSpec& grid, double fill) : grid_(grid) {
  grid.validate();
  values_.assign(grid.node_count(), fill);
}

std::size_t ScalarField::masked_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(),
                    [](double v) { return !std::isfinite(v); }));
}

}  // namespace gridwave
