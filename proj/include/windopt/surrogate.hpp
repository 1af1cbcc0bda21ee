#ifndef WINDOPT_SURROGATE_HPP
#define WINDOPT_SURROGATE_HPP

#include <filesystem>
#include <vector>

#include "windopt/risk.hpp"
#include "windopt/turbulence.hpp"
#include "windopt/vec3.hpp"
#include "windopt/wind_model.hpp"

namespace windopt {

/// Optimizable design: roof twist (radians, relative to the base) and roof
/// minor diameter. The roof major diameter follows from the area constraint.
struct Design {
  double twist = 0.0;
  double roof_minor = 30.0;
};

/// Roof major diameter from the fixed-area constraint pi*a*b/4 = area.
double enforce_area_constraint(double a, double roof_area);

/// Smooth drag correlation for a bluff elliptical section as a function of
/// the streamwise-to-crosswise aspect ratio. Anchored to standard sectional
/// drag values: thin plate broadside ~1.98, circular cylinder ~1.2,
/// streamlined 4:1 ellipse ~0.4.
struct DragModel {
  double floor = 0.2;
  double amplitude = 1.78;
  double decay = 0.55;

  double cd(double aspect) const;
};

/// Optional crosswind forcing: a sinusoidal lift term at the Strouhal-scaled
/// shedding frequency. Off by default.
struct VortexShedding {
  bool enabled = false;
  double strouhal = 0.2;
  double lift_coefficient = 0.4;
};

/// Elliptical tower, tapered and twisted linearly from base to roof.
/// base_orientation is a rigid yaw of the whole building on the site.
struct BuildingGeometry {
  double height = 180.0;
  double base_orientation = 0.0;  // radians
  double base_semi_major = 17.5;  // along the local x axis at z = 0
  double base_semi_minor = 10.0;  // along the local y axis at z = 0
  double roof_area = 875.0 * 3.14159265358979323846 / 5.0;  // pi*35*20/4
  Design design;
  int n_strips = 32;

  double roof_major() const { return enforce_area_constraint(design.roof_minor, roof_area); }
};

struct CrossSection {
  double semi_major;  // semi-axis along the rotated local x axis
  double semi_minor;  // semi-axis along the rotated local y axis
  double twist;       // section rotation, radians
};

/// Section at height z: semi-axes interpolate base -> roof linearly, the
/// twist grows linearly to the design value at the roof.
CrossSection cross_section(double z, const BuildingGeometry& geom);

/// Width of the section at z seen perpendicular to a flow at global angle
/// phi: 2 sqrt(p^2 sin^2 phi' + q^2 cos^2 phi') with phi' the angle in the
/// section frame.
double projected_width(double z, double flow_angle, const BuildingGeometry& geom);

/// Streamwise depth of the section (projection along the flow direction).
double projected_depth(double z, double flow_angle, const BuildingGeometry& geom);

struct LoadConfig {
  double rho = 1.225;
  double window_start = 50.0;
  double window_end = 200.0;
  double dt = 0.5;
  MeanProfileConfig profile;
  DragModel drag;
  VortexShedding shedding;
  /// Advection speed for box slicing; <= 0 means "use the scenario's mean
  /// speed at z_ref".
  double advection_speed = 0.0;
  bool wrap_time = false;
};

struct LoadSeries {
  TimeSeries moment_norm;        // |M(t)| over the analysis window
  std::vector<Vec3> moments;     // the moment vectors, same sampling
};

/// Quasi-steady strip evaluation of the base moment under one scenario and
/// one turbulence realization. Strips are midpoint slabs; the fluctuation is
/// sampled at the building centerline (y = 0). The relative flow angle uses
/// the scenario's mean direction; the force magnitude and direction use the
/// instantaneous horizontal velocity. Deterministic in (geom, scenario, box).
LoadSeries base_moment_series(const BuildingGeometry& geom, const WindScenario& scenario,
                              const TurbulenceBox& box, const LoadConfig& cfg);

/// Steady-uniform-wind base moment (no profile, no turbulence): every strip
/// sees the given horizontal wind vector. The zero-wind and hand-check limit
/// of the strip model.
Vec3 base_moment_steady(const BuildingGeometry& geom, const Vec3& wind, const LoadConfig& cfg);

/// CSV export of a load series: `t,Mx,My,Mz,Mnorm`, one row per sample.
void write_load_series_csv(const LoadSeries& series, const std::filesystem::path& path);

}  // namespace windopt

#endif  // WINDOPT_SURROGATE_HPP
