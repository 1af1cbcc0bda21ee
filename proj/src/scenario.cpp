#include "windopt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace windopt {

WindScenario sample_scenario(const ScenarioDistribution& dist, Rng& rng) {
  if (!dist.calibrated()) throw std::logic_error("sample_scenario: distribution not calibrated");

  const auto [theta, u_bar] = sample_joint(dist.copula, dist.direction, dist.speed, rng);
  const double z0 = rng.uniform(dist.z0_lower, dist.z0_upper);
  const double seed_u = rng.uniform();

  double u_star;
  const double floor = 34.5 * dist.profile.coriolis_f * dist.profile.z_ref / dist.profile.kappa;
  if (u_bar > floor * (1.0 + 1e-9)) {
    u_star = friction_velocity_from_speed(u_bar, dist.profile.z_ref, z0, dist.profile);
  } else {
    u_star = 1e-6;  // calm-tail draw below the Coriolis floor
  }

  return {u_star, theta, z0, seed_u};
}

WindScenario pwd_scenario(const ScenarioDistribution& dist) {
  if (!dist.calibrated()) throw std::logic_error("pwd_scenario: distribution not calibrated");
  const double theta_pwd = dist.direction.mode();
  const double u_star = friction_velocity_from_speed(dist.speed.mean(), dist.profile.z_ref,
                                                     dist.z0_nominal, dist.profile);
  return {u_star, theta_pwd, dist.z0_nominal, kPwdSeed};
}

void save_model(const ScenarioDistribution& dist, const std::filesystem::path& path) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["speed"] = {{"scale", dist.speed.scale}, {"shape", dist.speed.shape}};
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : dist.direction.components())
    comps.push_back({{"weight", c.weight},
                     {"location", c.location},
                     {"concentration", c.concentration}});
  j["direction"] = {{"components", comps}};
  j["z0"] = {{"lower", dist.z0_lower}, {"upper", dist.z0_upper}, {"nominal", dist.z0_nominal}};
  j["profile"] = {{"kappa", dist.profile.kappa},
                  {"coriolis_f", dist.profile.coriolis_f},
                  {"z_min", dist.profile.z_min},
                  {"z_ref", dist.profile.z_ref}};
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : dist.copula.points()) pts.push_back({p[0], p[1]});
  j["pseudo_observations"] = std::move(pts);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open model file for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("model file write failed: " + path.string());
}

ScenarioDistribution load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  nlohmann::json j;
  in >> j;
  if (j.value("schema_version", 0) != 1)
    throw std::runtime_error("unsupported model file schema: " + path.string());

  ScenarioDistribution dist;
  dist.speed.scale = j.at("speed").at("scale").get<double>();
  dist.speed.shape = j.at("speed").at("shape").get<double>();

  std::vector<VonMisesComponent> comps;
  for (const auto& c : j.at("direction").at("components"))
    comps.push_back({c.at("weight").get<double>(), c.at("location").get<double>(),
                     c.at("concentration").get<double>()});
  dist.direction = VonMisesMixture(std::move(comps));

  dist.z0_lower = j.at("z0").at("lower").get<double>();
  dist.z0_upper = j.at("z0").at("upper").get<double>();
  dist.z0_nominal = j.at("z0").at("nominal").get<double>();

  dist.profile.kappa = j.at("profile").at("kappa").get<double>();
  dist.profile.coriolis_f = j.at("profile").at("coriolis_f").get<double>();
  dist.profile.z_min = j.at("profile").at("z_min").get<double>();
  dist.profile.z_ref = j.at("profile").at("z_ref").get<double>();

  std::vector<std::array<double, 2>> pts;
  for (const auto& p : j.at("pseudo_observations"))
    pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  dist.copula = EmpiricalCopula(std::move(pts));
  return dist;
}

}  // namespace windopt
