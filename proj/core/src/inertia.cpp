#include "gridwave/inertia.hpp"

#include <cmath>

#include "gridwave/errors.hpp"
#include "gridwave/geo.hpp"

namespace gridwave {

void ContinuumParams::validate() const {
  if (!(omega_pu > 0.0)) throw ValidationError("omega_pu must be > 0");
  if (!(v_mag_pu > 0.0)) throw ValidationError("v_mag_pu must be > 0");
  if (!(z_mag_pu > 0.0)) throw ValidationError("z_mag_pu must be > 0");
  if (!(distance_base_km > 0.0)) throw ValidationError("distance_base_km must be > 0");
  if (!(theta_rad > 0.0 && theta_rad < std::numbers::pi)) {
    throw ValidationError("theta_rad must lie in (0, pi)");
  }
}

VectorField gradient_field(const ScalarField& tdoa) {
  const GridSpec& grid = tdoa.grid();
  if (grid.nx < 3 || grid.ny < 3) {
    throw ValidationError("gradient requires a grid of at least 3x3 nodes");
  }
  VectorField out;
  out.grid = grid;
  out.d_dlon.resize(grid.node_count());
  out.d_dlat.resize(grid.node_count());
  const double dlon = grid.dlon();
  const double dlat = grid.dlat();
  for (int i = 0; i < grid.ny; ++i) {
    for (int j = 0; j < grid.nx; ++j) {
      double ddlon;
      if (j == 0) {
        ddlon = (tdoa.at(i, 1) - tdoa.at(i, 0)) / dlon;
      } else if (j == grid.nx - 1) {
        ddlon = (tdoa.at(i, j) - tdoa.at(i, j - 1)) / dlon;
      } else {
        ddlon = (tdoa.at(i, j + 1) - tdoa.at(i, j - 1)) / (2.0 * dlon);
      }
      double ddlat;
      if (i == 0) {
        ddlat = (tdoa.at(1, j) - tdoa.at(0, j)) / dlat;
      } else if (i == grid.ny - 1) {
        ddlat = (tdoa.at(i, j) - tdoa.at(i - 1, j)) / dlat;
      } else {
        ddlat = (tdoa.at(i + 1, j) - tdoa.at(i - 1, j)) / (2.0 * dlat);
      }
      out.d_dlon[out.index(i, j)] = ddlon;
      out.d_dlat[out.index(i, j)] = ddlat;
    }
  }
  return out;
}

ScalarField speed_field(const VectorField& grad, double eps_grad_s_per_km) {
  grad.grid.validate();
  ScalarField speed(grad.grid);
  for (int i = 0; i < grad.grid.ny; ++i) {
    const DegreeCoefficients coeff = degree_coefficients(grad.grid.node(i, 0));
    for (int j = 0; j < grad.grid.nx; ++j) {
      const double glon = grad.d_dlon[grad.index(i, j)] / coeff.c_lon_km_per_deg;
      const double glat = grad.d_dlat[grad.index(i, j)] / coeff.c_lat_km_per_deg;
      const double slowness = std::sqrt(glon * glon + glat * glat);  // s/km
      if (!std::isfinite(slowness) || slowness < eps_grad_s_per_km) {
        speed.at(i, j) = kInvalidValue;
      } else {
        speed.at(i, j) = 1.0 / slowness;
      }
    }
  }
  return speed;
}

double inertia_from_speed_kms(double speed_km_s, const ContinuumParams& params) {
  const double v_pu = speed_km_s / params.distance_base_km;
  return params.omega_pu * params.v_mag_pu * params.v_mag_pu * std::sin(params.theta_rad) /
         (2.0 * params.z_mag_pu * v_pu * v_pu);
}

ScalarField inertia_from_speed(const ScalarField& speed, const ContinuumParams& params) {
  params.validate();
  ScalarField h(speed.grid());
  for (int i = 0; i < speed.grid().ny; ++i) {
    for (int j = 0; j < speed.grid().nx; ++j) {
      h.at(i, j) = speed.is_valid(i, j)
                       ? inertia_from_speed_kms(speed.at(i, j), params)
                       : kInvalidValue;
    }
  }
  return h;
}

}  // namespace gridwave
