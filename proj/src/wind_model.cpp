#include "windopt/wind_model.hpp"

#include <cmath>
#include <stdexcept>

namespace windopt {

double mean_wind_speed(double z, double u_star, double z0, const MeanProfileConfig& cfg) {
  if (!(z > 0.0)) throw std::domain_error("mean_wind_speed: height must be positive");
  if (!(u_star > 0.0)) throw std::domain_error("mean_wind_speed: u_star must be positive");
  if (!(z0 > 0.0)) throw std::domain_error("mean_wind_speed: z0 must be positive");
  const double zc = std::max(z, cfg.z_min);
  return (u_star * std::log(zc / z0) + 34.5 * cfg.coriolis_f * zc) / cfg.kappa;
}

Vec3 mean_wind_vector(double z, const WindScenario& scenario, const MeanProfileConfig& cfg) {
  const double speed = mean_wind_speed(z, scenario.u_star, scenario.z0, cfg);
  return {speed * std::cos(scenario.theta), speed * std::sin(scenario.theta), 0.0};
}

double friction_velocity_from_speed(double u_bar, double z, double z0,
                                    const MeanProfileConfig& cfg) {
  if (!(z > z0)) throw std::domain_error("friction_velocity_from_speed: need z > z0");
  const double numerator = cfg.kappa * u_bar - 34.5 * cfg.coriolis_f * z;
  if (!(numerator > 0.0))
    throw std::domain_error(
        "friction_velocity_from_speed: speed below the Coriolis floor (negative u_star)");
  return numerator / std::log(z / z0);
}

IntensityProfile turbulence_intensity_profile(std::span<const TurbulenceBox> samples,
                                              const MeanProfile& profile,
                                              std::span<const double> heights) {
  if (samples.empty()) throw std::invalid_argument("turbulence_intensity_profile: no samples");
  if (samples.size() < 2)
    throw std::invalid_argument("turbulence_intensity_profile: need at least 2 samples");

  const GridSpec& grid = samples.front().grid;
  for (const TurbulenceBox& box : samples)
    if (box.grid.n != grid.n || box.grid.extent != grid.extent)
      throw std::invalid_argument("turbulence_intensity_profile: inconsistent grids");

  IntensityProfile out;
  out.heights.assign(heights.begin(), heights.end());
  const double dz = grid.extent[2] / grid.n[2];

  for (double z : heights) {
    if (z < 0.0 || z > grid.extent[2])
      throw std::invalid_argument("turbulence_intensity_profile: height outside box extent");
    const int iz = static_cast<int>(std::lround(z / dz)) % grid.n[2];

    double sigma[3];
    for (int c = 0; c < 3; ++c) {
      double sum = 0.0, sum2 = 0.0;
      std::size_t count = 0;
      for (const TurbulenceBox& box : samples)
        for (int i1 = 0; i1 < grid.n[0]; ++i1)
          for (int i2 = 0; i2 < grid.n[1]; ++i2) {
            const double v = box.at(c, i1, i2, iz);
            sum += v;
            sum2 += v * v;
            ++count;
          }
      const double mean = sum / static_cast<double>(count);
      sigma[c] = std::sqrt(std::max(sum2 / static_cast<double>(count) - mean * mean, 0.0));
    }

    const double u_bar = profile.speed(z > 0.0 ? z : profile.cfg.z_min);
    out.ix.push_back(sigma[0] / u_bar);
    out.iy.push_back(sigma[1] / u_bar);
    out.iz.push_back(sigma[2] / u_bar);
  }
  return out;
}

}  // namespace windopt
