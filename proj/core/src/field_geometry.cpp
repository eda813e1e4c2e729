#include "nvrf/field_geometry.hpp"

#include "nvrf/errors.hpp"
#include <Eigen/Geometry>

#include <cmath>

namespace nvrf {

namespace {
constexpr double pi = std::numbers::pi;
}

void WireGeometry::validate() const
{
  if (!(width > 0)) { throw DomainError("wire width must be positive"); }
  if (!(standoff > 0)) { throw DomainError("standoff must be positive"); }
  if (std::abs(wire_axis.norm() - 1.0) > 1e-9 || std::abs(wire_axis.z()) > 1e-12) {
    throw DomainError("wire axis must be an in-plane unit vector");
  }
}

StripField strip_field(double x, double d, WireGeometry const &geom, PhysConsts const &c)
{
  if (!(d > 0)) { throw DomainError("strip_field needs d > 0"); }
  double const w = geom.width;
  double const a = 0.5 * w;
  double const k = c.mu0 * geom.current_amplitude / (2.0 * pi * w);
  StripField f;
  f.bx = k * (std::atan((x + a) / d) - std::atan((x - a) / d));
  f.bz = 0.5 * k * std::log(((x - a) * (x - a) + d * d) / ((x + a) * (x + a) + d * d));
  return f;
}

Eigen::Vector3d strip_field_vector(double x_lab, WireGeometry const &geom, PhysConsts const &c)
{
  geom.validate();
  Eigen::Vector3d const ez{0.0, 0.0, 1.0};
  Eigen::Vector3d const ex = geom.wire_axis.cross(ez); // transverse in-plane, x for a wire along +y
  double const x = (x_lab - geom.lateral_offset) * ex.x();
  auto const f = strip_field(x, geom.standoff, geom, c);
  return f.bx * ex + f.bz * ez;
}

double project_to_nv(Eigen::Vector3d const &b, Eigen::Vector3d const &nv_axis)
{
  if (std::abs(nv_axis.norm() - 1.0) > 1e-9) { throw DomainError("NV axis must have unit norm"); }
  return b.dot(nv_axis);
}

FieldMap build_field_map(Grid const &grid, WireGeometry const &geom, Eigen::Vector3d const &nv_axis,
                         PhysConsts const &c)
{
  if (!(grid.spacing > 0) || grid.nx <= 0 || grid.ny <= 0) { throw DomainError("invalid field-map grid"); }
  geom.validate();
  FieldMap m;
  m.grid = grid;
  m.values.resize(static_cast<std::size_t>(grid.nx) * grid.ny);
  // The strip is infinite along y, so one row determines the map.
  std::vector<double> row(grid.nx);
  for (int ix = 0; ix < grid.nx; ++ix) {
    row[ix] = project_to_nv(strip_field_vector(m.x(ix), geom, c), nv_axis);
  }
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      m.at(ix, iy) = row[ix];
    }
  }
  return m;
}

double calibrate_current(double target, double x_lab, WireGeometry const &geom, Eigen::Vector3d const &nv_axis,
                         PhysConsts const &c)
{
  WireGeometry unit = geom;
  unit.current_amplitude = 1.0;
  double const per_amp = project_to_nv(strip_field_vector(x_lab, unit, c), nv_axis);
  double const scale = c.mu0 / (2.0 * pi * geom.width);
  if (std::abs(per_amp) < 1e-9 * scale) {
    throw UncalibratableError("projected field vanishes at x = " + std::to_string(x_lab) + " m");
  }
  return target / per_amp;
}

double projected_extremum_x(WireGeometry const &geom)
{
  double const a = 0.5 * geom.width;
  return geom.lateral_offset - std::sqrt(a * a + geom.standoff * geom.standoff);
}

} // namespace nvrf
