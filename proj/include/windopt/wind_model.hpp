#ifndef WINDOPT_WIND_MODEL_HPP
#define WINDOPT_WIND_MODEL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "windopt/turbulence.hpp"
#include "windopt/vec3.hpp"

namespace windopt {

/// Quasi-logarithmic mean-profile configuration. z_min is the codebook
/// clamping height; it must exceed every admissible roughness length.
struct MeanProfileConfig {
  double kappa = 0.41;
  double coriolis_f = 1.0e-4;
  double z_min = 2.0;
  double z_ref = 80.0;
};

/// One random draw of the environment: friction velocity, direction,
/// roughness length and the unit-interval turbulence seed.
struct WindScenario {
  double u_star = 1.0;   // m/s, > 0
  double theta = 0.0;    // rad, [0, 2*pi)
  double z0 = 0.05;      // m, > 0
  double seed_u = 0.0;   // in [0, 1]

  /// Maps the unit-interval seed to a generator seed by scaling with 2^53
  /// and truncating, so runs are bit-reproducible from the stored real.
  std::uint64_t turbulence_seed() const {
    return static_cast<std::uint64_t>(seed_u * 9007199254740992.0);
  }
};

/// Mean wind speed at height z: (u* ln(z/z0) + 34.5 f z) / kappa for
/// z >= z_min, clamped to the z_min value below.
double mean_wind_speed(double z, double u_star, double z0, const MeanProfileConfig& cfg);

/// Mean wind vector: magnitude from mean_wind_speed along e(theta) =
/// (cos theta, sin theta, 0).
Vec3 mean_wind_vector(double z, const WindScenario& scenario, const MeanProfileConfig& cfg);

/// Inverse of the profile law at a fixed height:
/// u* = (kappa u_bar - 34.5 f z) / ln(z/z0). Throws if the numerator is
/// non-positive (the profile cannot produce that speed).
double friction_velocity_from_speed(double u_bar, double z, double z0,
                                    const MeanProfileConfig& cfg);

/// Mean profile bound to one scenario's parameters.
struct MeanProfile {
  double u_star = 1.0;
  double z0 = 0.05;
  MeanProfileConfig cfg;

  double speed(double z) const { return mean_wind_speed(z, u_star, z0, cfg); }
};

struct IntensityProfile {
  std::vector<double> heights;
  std::vector<double> ix, iy, iz;
};

/// Turbulence intensity I_i(z) = sigma_i(z) / u_bar(z), with sigma_i the
/// pooled temporal/ensemble standard deviation of fluctuation component i
/// at the grid plane nearest to each height. Needs at least 2 boxes.
IntensityProfile turbulence_intensity_profile(std::span<const TurbulenceBox> samples,
                                              const MeanProfile& profile,
                                              std::span<const double> heights);

}  // namespace windopt

#endif  // WINDOPT_WIND_MODEL_HPP
