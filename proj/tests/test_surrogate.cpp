#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "windopt/rng.hpp"
#include "windopt/surrogate.hpp"

using namespace windopt;

namespace {

constexpr double kPi = std::numbers::pi;

// Prismatic circular tower of radius r (roof area pins b = 2r as well).
BuildingGeometry circular_tower(double r) {
  BuildingGeometry g;
  g.height = 180.0;
  g.base_semi_major = r;
  g.base_semi_minor = r;
  g.roof_area = kPi * r * r;
  g.design = {0.0, 2.0 * r};
  return g;
}

}  // namespace

TEST_CASE("area constraint") {
  CHECK(enforce_area_constraint(30.0, 225.0 * kPi) == doctest::Approx(30.0).epsilon(1e-15));
  CHECK(enforce_area_constraint(24.383, 225.0 * kPi) ==
        doctest::Approx(900.0 / 24.383).epsilon(1e-15));
  CHECK(900.0 / 24.383 == doctest::Approx(36.91).epsilon(1e-3));
  CHECK(enforce_area_constraint(20.0, 225.0 * kPi) ==
        doctest::Approx(2.0 * enforce_area_constraint(40.0, 225.0 * kPi)).epsilon(1e-15));
  CHECK_THROWS_AS(enforce_area_constraint(0.0, 100.0), std::domain_error);
  CHECK_THROWS_AS(enforce_area_constraint(-3.0, 100.0), std::domain_error);

  // pi a b / 4 returns the area exactly.
  const double b = enforce_area_constraint(23.7, 540.0);
  CHECK(kPi * 23.7 * b / 4.0 == doctest::Approx(540.0).epsilon(1e-14));
}

TEST_CASE("cross section interpolates base to roof") {
  BuildingGeometry g;
  g.height = 180.0;
  g.base_semi_major = 17.5;
  g.base_semi_minor = 10.0;
  g.roof_area = kPi * 35.0 * 20.0 / 4.0;
  g.design = {0.9, 16.0};  // roof minor diameter 16 -> major 700/16

  const CrossSection base = cross_section(0.0, g);
  CHECK(base.semi_major == 17.5);
  CHECK(base.semi_minor == 10.0);
  CHECK(base.twist == 0.0);

  const CrossSection roof = cross_section(180.0, g);
  CHECK(roof.semi_minor == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(roof.semi_major == doctest::Approx(0.5 * 700.0 / 16.0).epsilon(1e-15));
  CHECK(roof.twist == doctest::Approx(0.9).epsilon(1e-15));

  const CrossSection mid = cross_section(90.0, g);
  CHECK(mid.semi_major == doctest::Approx(0.5 * (17.5 + 0.5 * 700.0 / 16.0)).epsilon(1e-15));
  CHECK(mid.semi_minor == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(mid.twist == doctest::Approx(0.45).epsilon(1e-15));

  CHECK_THROWS_AS(cross_section(-1.0, g), std::out_of_range);
  CHECK_THROWS_AS(cross_section(181.0, g), std::out_of_range);
}

TEST_CASE("projected width of rotated ellipses") {
  const BuildingGeometry circle = circular_tower(7.0);
  for (double phi = 0.0; phi < 6.3; phi += 0.41)
    CHECK(projected_width(90.0, phi, circle) == doctest::Approx(14.0).epsilon(1e-13));

  // Prismatic ellipse with semi-axes (2, 1).
  BuildingGeometry e;
  e.height = 180.0;
  e.base_semi_major = 2.0;
  e.base_semi_minor = 1.0;
  e.roof_area = kPi * 2.0;  // pi * a * b / 4 with diameters (2, 4)
  e.design = {0.0, 2.0};

  // Flow along the major axis sees the minor width.
  CHECK(projected_width(50.0, 0.0, e) == doctest::Approx(2.0).epsilon(1e-14));
  // 45 degrees: 2 sqrt(4 * 0.5 + 1 * 0.5) = sqrt(10).
  CHECK(projected_width(50.0, kPi / 4.0, e) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
  // Depth swaps the roles.
  CHECK(projected_depth(50.0, 0.0, e) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("steady base moment: zero wind and the two-strip hand case") {
  BuildingGeometry g = circular_tower(10.0);
  g.n_strips = 2;  // strips at z = 45 and z = 135
  const LoadConfig cfg;

  const Vec3 none = base_moment_steady(g, {0.0, 0.0, 0.0}, cfg);
  CHECK(norm(none) == 0.0);

  const double u = 12.0;
  // Per-strip force: 1/2 rho cd(1) width dz u^2, width 20, dz 90.
  const double f = 0.5 * cfg.rho * cfg.drag.cd(1.0) * 20.0 * 90.0 * u * u;
  const Vec3 m = base_moment_steady(g, {u, 0.0, 0.0}, cfg);
  CHECK(m.x == doctest::Approx(0.0));
  CHECK(m.y == doctest::Approx(f * (45.0 + 135.0)).epsilon(1e-12));
  CHECK(m.z == 0.0);
  CHECK(norm(m) == doctest::Approx(f * 180.0).epsilon(1e-12));
}

TEST_CASE("steady moment scales quadratically with speed") {
  BuildingGeometry g;
  g.design = {1.2, 24.0};
  g.roof_area = kPi * 35.0 * 20.0 / 4.0;
  const LoadConfig cfg;
  const Vec3 wind{8.0, 3.0, 0.0};
  const double base = norm(base_moment_steady(g, wind, cfg));
  for (double c : {2.0, 3.5, 10.0}) {
    const double scaled = norm(base_moment_steady(g, {c * wind.x, c * wind.y, 0.0}, cfg));
    CHECK(scaled == doctest::Approx(c * c * base).epsilon(1e-12));
  }
}

TEST_CASE("rotational consistency and circular symmetry") {
  const LoadConfig cfg;

  // Rotating the wind and the building orientation together changes nothing.
  BuildingGeometry g;
  g.design = {2.1, 26.0};
  g.roof_area = kPi * 35.0 * 20.0 / 4.0;
  const double speed = 15.0;
  const double base = norm(base_moment_steady(g, {speed, 0.0, 0.0}, cfg));
  Rng rng(33);
  for (int i = 0; i < 12; ++i) {
    const double delta = rng.uniform(0.0, 2.0 * kPi);
    BuildingGeometry rotated = g;
    rotated.base_orientation = delta;
    const Vec3 wind{speed * std::cos(delta), speed * std::sin(delta), 0.0};
    CHECK(norm(base_moment_steady(rotated, wind, cfg)) == doctest::Approx(base).epsilon(1e-12));
  }

  // A circular section at every height is insensitive to direction.
  const BuildingGeometry circle = circular_tower(9.0);
  const double ref = norm(base_moment_steady(circle, {speed, 0.0, 0.0}, cfg));
  for (int i = 0; i < 12; ++i) {
    const double theta = rng.uniform(0.0, 2.0 * kPi);
    const Vec3 wind{speed * std::cos(theta), speed * std::sin(theta), 0.0};
    CHECK(norm(base_moment_steady(circle, wind, cfg)) == doctest::Approx(ref).epsilon(1e-12));
  }

  // Monotone in steady speed.
  double prev = 0.0;
  for (double u = 1.0; u < 40.0; u += 2.3) {
    const double m = norm(base_moment_steady(g, {u, 0.0, 0.0}, cfg));
    CHECK(m > prev);
    prev = m;
  }
}

TEST_CASE("moment series from a turbulence box") {
  BuildingGeometry g;
  g.design = {1.0, 22.0};
  g.roof_area = kPi * 35.0 * 20.0 / 4.0;

  const SpectralParams params{0.5, 30.0, 0.0};
  const GridSpec grid{{64, 8, 16}, {6000.0, 120.0, 240.0}};
  const TurbulenceBox box = generate_box(params, grid, 5);

  const WindScenario scenario{1.2, 0.7, 0.05, 0.3};
  LoadConfig cfg;
  cfg.dt = 1.0;

  const LoadSeries series = base_moment_series(g, scenario, box, cfg);
  const auto expected_steps = static_cast<std::size_t>(
      std::floor((cfg.window_end - cfg.window_start) / cfg.dt)) + 1;
  CHECK(series.moment_norm.values.size() == expected_steps);
  CHECK(series.moment_norm.start == cfg.window_start);
  for (double v : series.moment_norm.values) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
  for (const Vec3& m : series.moments) CHECK(m.z == 0.0);

  // Deterministic in (geom, scenario, box).
  const LoadSeries again = base_moment_series(g, scenario, box, cfg);
  for (std::size_t i = 0; i < series.moment_norm.values.size(); ++i)
    CHECK(series.moment_norm.values[i] == again.moment_norm.values[i]);

  // Window past the box extent without wrapping is rejected.
  LoadConfig strict = cfg;
  strict.advection_speed = 100.0;  // extent 30 s < 200 s window
  CHECK_THROWS_AS(base_moment_series(g, scenario, box, strict), std::out_of_range);
  strict.wrap_time = true;
  CHECK_NOTHROW(base_moment_series(g, scenario, box, strict));
}

TEST_CASE("load series csv export parses back") {
  BuildingGeometry g = circular_tower(8.0);
  const SpectralParams params{0.4, 20.0, 0.0};
  const GridSpec grid{{32, 4, 8}, {6000.0, 60.0, 240.0}};
  const TurbulenceBox box = generate_box(params, grid, 11);
  LoadConfig cfg;
  cfg.dt = 5.0;
  const LoadSeries series = base_moment_series(g, {1.0, 0.5, 0.05, 0.2}, box, cfg);

  const auto dir = std::filesystem::temp_directory_path() / "windopt_series_csv";
  std::filesystem::create_directories(dir);
  const auto file = dir / "series.csv";
  write_load_series_csv(series, file);

  std::ifstream in(file);
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header == "t,Mx,My,Mz,Mnorm");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    double t, mx, my, mz, mn;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &t, &mx, &my, &mz, &mn) == 5);
    CHECK(mn == doctest::Approx(std::sqrt(mx * mx + my * my + mz * mz)).epsilon(1e-12));
    if (rows == 0) CHECK(t == cfg.window_start);
    ++rows;
  }
  CHECK(rows == series.moment_norm.values.size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("vortex shedding adds crosswind content without breaking scaling") {
  BuildingGeometry g = circular_tower(10.0);
  LoadConfig cfg;
  cfg.shedding.enabled = true;

  // With steady wind along x and lift enabled at t = 0 the lift term
  // vanishes only where sin(phase) does; the moment picks up an x component.
  const Vec3 m = base_moment_steady(g, {10.0, 0.0, 0.0}, cfg);
  CHECK(std::abs(m.x) > 0.0);
}
