#include "windopt/surrogate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace windopt {

namespace {

// Strip force on a midpoint slab. The geometric factors (width, depth, drag
// coefficient) come from the mean flow angle; magnitude and direction follow
// the instantaneous horizontal velocity.
Vec3 strip_force(const BuildingGeometry& geom, const LoadConfig& cfg, double z,
                 double mean_angle, const Vec3& velocity, double dz, double t) {
  const Vec3 horizontal{velocity.x, velocity.y, 0.0};
  const double speed = norm(horizontal);
  if (speed == 0.0) return {0.0, 0.0, 0.0};

  const double width = projected_width(z, mean_angle, geom);
  const double depth = projected_depth(z, mean_angle, geom);
  const double cd = cfg.drag.cd(depth / width);
  const double q = 0.5 * cfg.rho * cd * width * dz;
  Vec3 force = q * speed * horizontal;

  if (cfg.shedding.enabled) {
    const double freq = cfg.shedding.strouhal * speed / width;
    // Height-staggered phase so strips do not shed in lockstep.
    const double phase = 2.0 * std::numbers::pi * z / geom.height;
    const double lift = 0.5 * cfg.rho * cfg.shedding.lift_coefficient * width * dz * speed *
                        speed * std::sin(2.0 * std::numbers::pi * freq * t + phase);
    // Unit vector perpendicular to the instantaneous flow, in the plane.
    force += (lift / speed) * Vec3{-horizontal.y, horizontal.x, 0.0};
  }
  return force;
}

}  // namespace

double enforce_area_constraint(double a, double roof_area) {
  if (!(a > 0.0)) throw std::domain_error("enforce_area_constraint: diameter must be positive");
  if (!(roof_area > 0.0)) throw std::domain_error("enforce_area_constraint: area must be positive");
  return 4.0 * roof_area / (std::numbers::pi * a);
}

double DragModel::cd(double aspect) const {
  if (!(aspect >= 0.0)) throw std::domain_error("DragModel::cd: aspect must be nonnegative");
  return floor + amplitude * std::exp(-decay * aspect);
}

CrossSection cross_section(double z, const BuildingGeometry& geom) {
  if (z < 0.0 || z > geom.height)
    throw std::out_of_range("cross_section: height outside the building");
  const double s = z / geom.height;
  const double roof_semi_major = 0.5 * geom.roof_major();
  const double roof_semi_minor = 0.5 * geom.design.roof_minor;
  return {(1.0 - s) * geom.base_semi_major + s * roof_semi_major,
          (1.0 - s) * geom.base_semi_minor + s * roof_semi_minor,
          geom.base_orientation + s * geom.design.twist};
}

double projected_width(double z, double flow_angle, const BuildingGeometry& geom) {
  const CrossSection sec = cross_section(z, geom);
  const double rel = flow_angle - sec.twist;
  const double s = std::sin(rel), c = std::cos(rel);
  return 2.0 * std::sqrt(sec.semi_major * sec.semi_major * s * s +
                         sec.semi_minor * sec.semi_minor * c * c);
}

double projected_depth(double z, double flow_angle, const BuildingGeometry& geom) {
  const CrossSection sec = cross_section(z, geom);
  const double rel = flow_angle - sec.twist;
  const double s = std::sin(rel), c = std::cos(rel);
  return 2.0 * std::sqrt(sec.semi_major * sec.semi_major * c * c +
                         sec.semi_minor * sec.semi_minor * s * s);
}

LoadSeries base_moment_series(const BuildingGeometry& geom, const WindScenario& scenario,
                              const TurbulenceBox& box, const LoadConfig& cfg) {
  if (geom.n_strips < 2) throw std::invalid_argument("base_moment_series: need >= 2 strips");
  if (!(cfg.window_end > cfg.window_start) || !(cfg.dt > 0.0))
    throw std::invalid_argument("base_moment_series: bad analysis window");

  const double advection = cfg.advection_speed > 0.0
                               ? cfg.advection_speed
                               : mean_wind_speed(cfg.profile.z_ref, scenario.u_star,
                                                 scenario.z0, cfg.profile);
  if (!cfg.wrap_time && cfg.window_end > box.time_extent(advection))
    throw std::out_of_range("base_moment_series: window outside box time extent");

  const double dz = geom.height / geom.n_strips;
  const int n_steps = static_cast<int>(std::floor((cfg.window_end - cfg.window_start) / cfg.dt));

  std::vector<double> strip_z(geom.n_strips);
  std::vector<Vec3> mean_wind(geom.n_strips);
  for (int j = 0; j < geom.n_strips; ++j) {
    strip_z[j] = (j + 0.5) * dz;
    mean_wind[j] = mean_wind_vector(strip_z[j], scenario, cfg.profile);
  }

  LoadSeries series;
  series.moment_norm.start = cfg.window_start;
  series.moment_norm.dt = cfg.dt;
  series.moment_norm.values.reserve(n_steps + 1);
  series.moments.reserve(n_steps + 1);

  for (int step = 0; step <= n_steps; ++step) {
    const double t = cfg.window_start + step * cfg.dt;
    const InletPlane plane = slice_inlet(box, t, advection, cfg.wrap_time);
    Vec3 moment{0.0, 0.0, 0.0};
    for (int j = 0; j < geom.n_strips; ++j) {
      const Vec3 fluctuation = plane.sample(0.0, strip_z[j]);
      const Vec3 velocity = mean_wind[j] + fluctuation;
      const Vec3 force =
          strip_force(geom, cfg, strip_z[j], scenario.theta, velocity, dz, t);
      moment += cross({0.0, 0.0, strip_z[j]}, force);
    }
    series.moments.push_back(moment);
    series.moment_norm.values.push_back(norm(moment));
  }
  return series;
}

Vec3 base_moment_steady(const BuildingGeometry& geom, const Vec3& wind, const LoadConfig& cfg) {
  if (geom.n_strips < 2) throw std::invalid_argument("base_moment_steady: need >= 2 strips");
  const double dz = geom.height / geom.n_strips;
  const double angle = (wind.x == 0.0 && wind.y == 0.0) ? 0.0 : std::atan2(wind.y, wind.x);
  Vec3 moment{0.0, 0.0, 0.0};
  for (int j = 0; j < geom.n_strips; ++j) {
    const double z = (j + 0.5) * dz;
    const Vec3 force = strip_force(geom, cfg, z, angle, wind, dz, 0.0);
    moment += cross({0.0, 0.0, z}, force);
  }
  return moment;
}

void write_load_series_csv(const LoadSeries& series, const std::filesystem::path& path) {
  if (series.moments.size() != series.moment_norm.values.size())
    throw std::invalid_argument("write_load_series_csv: inconsistent series");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open load series file: " + path.string());
  const auto g17 = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "t,Mx,My,Mz,Mnorm\n";
  for (std::size_t i = 0; i < series.moments.size(); ++i) {
    const double t = series.moment_norm.start + static_cast<double>(i) * series.moment_norm.dt;
    const Vec3& mv = series.moments[i];
    out << g17(t) << ',' << g17(mv.x) << ',' << g17(mv.y) << ',' << g17(mv.z) << ','
        << g17(series.moment_norm.values[i]) << '\n';
  }
  if (!out) throw std::runtime_error("load series write failed: " + path.string());
}

}  // namespace windopt
