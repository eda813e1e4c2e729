#pragma once

#include "physical_model.hpp"

#include <Eigen/Core>
#include <vector>

namespace nvrf {

// Lab frame: x transverse to the wire in-plane, y along the wire, z the
// surface normal pointing from the wire plane to the NV layer.
struct WireGeometry
{
  double width = 10e-6;
  double current_amplitude = 1e-3; ///< A, positive along wire_axis
  double standoff = 2e-6;
  Eigen::Vector3d wire_axis{0.0, 1.0, 0.0};
  double lateral_offset = 0; ///< x of the wire center

  void validate() const;
};

struct StripField
{
  double bx = 0;
  double bz = 0;
};

/// Closed-form field of a thin strip with uniform surface current, at lateral
/// position x (from the strip center) and height d above it.
StripField strip_field(double x, double d, WireGeometry const &geom, PhysConsts const &c);

/// Same field as a lab-frame vector at lab x.
Eigen::Vector3d strip_field_vector(double x_lab, WireGeometry const &geom, PhysConsts const &c);

/// B . n with n a unit vector (tolerance 1e-9).
double project_to_nv(Eigen::Vector3d const &b, Eigen::Vector3d const &nv_axis);

struct Grid
{
  double spacing = 1e-6;
  double origin_x = 0; ///< center of cell (0,0), m
  double origin_y = 0;
  int nx = 0;
  int ny = 0;
};

/// Row-major (y rows, x columns) map of NV-projected field amplitudes, T.
struct FieldMap
{
  Grid grid;
  std::vector<double> values;

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * grid.nx + ix]; }
  double &at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * grid.nx + ix]; }
  double x(int ix) const { return grid.origin_x + ix * grid.spacing; }
  double y(int iy) const { return grid.origin_y + iy * grid.spacing; }
};

FieldMap build_field_map(Grid const &grid, WireGeometry const &geom, Eigen::Vector3d const &nv_axis,
                         PhysConsts const &c);

/// Current that makes the projected field at lab x equal `target`. Throws
/// UncalibratableError where the projection per unit current vanishes.
double calibrate_current(double target, double x_lab, WireGeometry const &geom, Eigen::Vector3d const &nv_axis,
                         PhysConsts const &c);

/// Lab x of the projected-field extremum on the -x edge (the positive maximum
/// for positive current and the default frame): center - sqrt(w^2/4 + d^2).
double projected_extremum_x(WireGeometry const &geom);

} // namespace nvrf
