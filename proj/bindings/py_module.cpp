#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstdint>

#include "windopt/copula.hpp"
#include "windopt/marginals.hpp"
#include "windopt/optimizer.hpp"
#include "windopt/risk.hpp"
#include "windopt/scenario.hpp"
#include "windopt/surrogate.hpp"
#include "windopt/turbulence.hpp"
#include "windopt/wind_model.hpp"

namespace py = pybind11;
using namespace windopt;

namespace {

TimeSeries make_series(std::vector<double> values, double dt, double start) {
  return {start, dt, std::move(values)};
}

py::array_t<double> box_field(const TurbulenceBox& box) {
  const auto& n = box.grid.n;
  py::array_t<double> out({3, n[0], n[1], n[2]});
  std::copy(box.field.begin(), box.field.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wind-load shape optimization toolkit: mean-profile and scenario "
            "models, Mann-type turbulence synthesis, strip-surrogate loads, "
            "risk measures, and adaptive-sampling SGD.";

  // --- mean profile -------------------------------------------------------
  py::class_<MeanProfileConfig>(m, "MeanProfileConfig")
      .def(py::init<>())
      .def_readwrite("kappa", &MeanProfileConfig::kappa)
      .def_readwrite("coriolis_f", &MeanProfileConfig::coriolis_f)
      .def_readwrite("z_min", &MeanProfileConfig::z_min)
      .def_readwrite("z_ref", &MeanProfileConfig::z_ref);

  py::class_<WindScenario>(m, "WindScenario")
      .def(py::init<>())
      .def(py::init([](double u_star, double theta, double z0, double seed_u) {
             return WindScenario{u_star, theta, z0, seed_u};
           }),
           py::arg("u_star"), py::arg("theta"), py::arg("z0"), py::arg("seed_u"))
      .def_readwrite("u_star", &WindScenario::u_star)
      .def_readwrite("theta", &WindScenario::theta)
      .def_readwrite("z0", &WindScenario::z0)
      .def_readwrite("seed_u", &WindScenario::seed_u)
      .def("turbulence_seed", &WindScenario::turbulence_seed);

  m.def("mean_wind_speed", &mean_wind_speed, py::arg("z"), py::arg("u_star"), py::arg("z0"),
        py::arg("cfg") = MeanProfileConfig{});
  m.def(
      "mean_wind_vector",
      [](double z, const WindScenario& s, const MeanProfileConfig& cfg) {
        const Vec3 v = mean_wind_vector(z, s, cfg);
        return py::make_tuple(v.x, v.y, v.z);
      },
      py::arg("z"), py::arg("scenario"), py::arg("cfg") = MeanProfileConfig{});
  m.def("friction_velocity_from_speed", &friction_velocity_from_speed, py::arg("u_bar"),
        py::arg("z"), py::arg("z0"), py::arg("cfg") = MeanProfileConfig{});

  // --- risk measures ------------------------------------------------------
  m.def(
      "time_average",
      [](std::vector<double> values, double dt, double start) {
        return time_average(make_series(std::move(values), dt, start));
      },
      py::arg("values"), py::arg("dt") = 1.0, py::arg("start") = 0.0);
  m.def("ensemble_mean",
        [](const std::vector<double>& v) { return ensemble_mean(v); });
  m.def("variance", [](const std::vector<double>& v) { return variance(v); });
  m.def("std_dev", [](const std::vector<double>& v) { return std_dev(v); });
  m.def("estimator_variance",
        [](const std::vector<double>& v) { return estimator_variance(v); });
  m.def(
      "value_at_risk",
      [](const std::vector<double>& v, double beta) { return value_at_risk(v, beta); },
      py::arg("values"), py::arg("beta"));
  m.def(
      "cvar",
      [](const std::vector<double>& v, double beta) {
        const CvarResult r = cvar(v, beta);
        return py::make_tuple(r.cvar, r.s_star);
      },
      py::arg("values"), py::arg("beta"), "Returns (cvar, s_star).");
  m.def(
      "cvar_tail_series",
      [](std::vector<double> values, double s, double dt, double start) {
        return cvar_tail_series(make_series(std::move(values), dt, start), s);
      },
      py::arg("values"), py::arg("s"), py::arg("dt") = 1.0, py::arg("start") = 0.0);

  // --- marginals and copula -----------------------------------------------
  py::class_<WeibullMarginal>(m, "WeibullMarginal")
      .def(py::init([](double scale, double shape) {
             return WeibullMarginal{scale, shape};
           }),
           py::arg("scale"), py::arg("shape"))
      .def_readonly("scale", &WeibullMarginal::scale)
      .def_readonly("shape", &WeibullMarginal::shape)
      .def("pdf", &WeibullMarginal::pdf)
      .def("cdf", &WeibullMarginal::cdf)
      .def("quantile", &WeibullMarginal::quantile)
      .def("mean", &WeibullMarginal::mean);

  py::class_<WeibullFit>(m, "WeibullFit")
      .def_readonly("marginal", &WeibullFit::marginal)
      .def_readonly("dropped_nonpositive", &WeibullFit::dropped_nonpositive)
      .def_readonly("log_likelihood", &WeibullFit::log_likelihood)
      .def_readonly("gradient_norm", &WeibullFit::gradient_norm);

  m.def("fit_weibull",
        [](const std::vector<double>& speeds) { return fit_weibull(speeds); });

  py::class_<VonMisesComponent>(m, "VonMisesComponent")
      .def_readonly("weight", &VonMisesComponent::weight)
      .def_readonly("location", &VonMisesComponent::location)
      .def_readonly("concentration", &VonMisesComponent::concentration);

  py::class_<VonMisesMixture>(m, "VonMisesMixture")
      .def(py::init([](const std::vector<std::tuple<double, double, double>>& comps) {
             std::vector<VonMisesComponent> c;
             for (const auto& [w, mu, kappa] : comps) c.push_back({w, mu, kappa});
             return VonMisesMixture(std::move(c));
           }),
           py::arg("components"), "components: list of (weight, location, concentration)")
      .def("components", &VonMisesMixture::components)
      .def("pdf", &VonMisesMixture::pdf)
      .def("cdf", &VonMisesMixture::cdf)
      .def("quantile", &VonMisesMixture::quantile)
      .def("mode", &VonMisesMixture::mode);

  m.def(
      "fit_von_mises_mixture",
      [](const std::vector<double>& angles, int n_components,
         const std::optional<std::vector<double>>& fixed_locations) {
        VonMisesFitOptions opts;
        opts.n_components = n_components;
        opts.fixed_locations = fixed_locations;
        const VonMisesFit fit = fit_von_mises_mixture(angles, opts);
        return py::make_tuple(fit.mixture, fit.log_likelihood, fit.iterations);
      },
      py::arg("angles"), py::arg("n_components") = 4,
      py::arg("fixed_locations") = std::nullopt,
      "Returns (mixture, log_likelihood, iterations).");

  py::class_<EmpiricalCopula>(m, "EmpiricalCopula")
      .def(py::init<std::vector<std::array<double, 2>>>())
      .def("cdf", &EmpiricalCopula::cdf)
      .def("size", &EmpiricalCopula::size)
      .def("points", &EmpiricalCopula::points);

  m.def(
      "pseudo_observations",
      [](const std::vector<double>& thetas, const std::vector<double>& speeds,
         const VonMisesMixture& vm, const WeibullMarginal& wb) {
        return pseudo_observations(thetas, speeds, vm, wb);
      },
      py::arg("thetas_rad"), py::arg("speeds"), py::arg("theta_marginal"),
      py::arg("speed_marginal"));
  m.def(
      "sample_joint",
      [](const EmpiricalCopula& cop, const VonMisesMixture& vm, const WeibullMarginal& wb,
         std::uint64_t seed, bool jitter) {
        Rng rng(seed);
        return sample_joint(cop, vm, wb, rng, jitter);
      },
      py::arg("copula"), py::arg("theta_marginal"), py::arg("speed_marginal"),
      py::arg("seed"), py::arg("jitter") = true, "Returns (theta, u_bar).");

  // --- turbulence synthesis -----------------------------------------------
  py::class_<SpectralParams>(m, "SpectralParams")
      .def(py::init([](double energy_coeff, double length_scale, double gamma) {
             return SpectralParams{energy_coeff, length_scale, gamma};
           }),
           py::arg("energy_coeff") = 1.0, py::arg("length_scale") = 33.6,
           py::arg("gamma") = 0.0)
      .def_readwrite("energy_coeff", &SpectralParams::energy_coeff)
      .def_readwrite("length_scale", &SpectralParams::length_scale)
      .def_readwrite("gamma", &SpectralParams::gamma);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](std::array<int, 3> n, std::array<double, 3> extent) {
             return GridSpec{n, extent};
           }),
           py::arg("n"), py::arg("extent"))
      .def_readwrite("n", &GridSpec::n)
      .def_readwrite("extent", &GridSpec::extent);

  py::class_<TurbulenceBox>(m, "TurbulenceBox")
      .def_property_readonly("grid", [](const TurbulenceBox& b) { return b.grid; })
      .def_property_readonly("seed", [](const TurbulenceBox& b) { return b.seed; })
      .def_property_readonly("field", &box_field,
                             "Fluctuation field, shape (3, n1, n2, n3).")
      .def("time_extent", &TurbulenceBox::time_extent);

  m.def("generate_box", &generate_box, py::arg("params"), py::arg("grid"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("resolved_band_variance", &resolved_band_variance, py::arg("params"),
        py::arg("grid"), py::arg("component"));
  m.def("write_box", &write_box, py::arg("box"), py::arg("path"));
  m.def("read_box", &read_box, py::arg("path"));

  // --- building surrogate --------------------------------------------------
  m.def("enforce_area_constraint", &enforce_area_constraint, py::arg("a"),
        py::arg("roof_area"));

  py::class_<Design>(m, "Design")
      .def(py::init([](double twist, double roof_minor) {
             return Design{twist, roof_minor};
           }),
           py::arg("twist"), py::arg("roof_minor"))
      .def_readwrite("twist", &Design::twist)
      .def_readwrite("roof_minor", &Design::roof_minor);

  py::class_<BuildingGeometry>(m, "BuildingGeometry")
      .def(py::init<>())
      .def_readwrite("height", &BuildingGeometry::height)
      .def_readwrite("base_orientation", &BuildingGeometry::base_orientation)
      .def_readwrite("base_semi_major", &BuildingGeometry::base_semi_major)
      .def_readwrite("base_semi_minor", &BuildingGeometry::base_semi_minor)
      .def_readwrite("roof_area", &BuildingGeometry::roof_area)
      .def_readwrite("design", &BuildingGeometry::design)
      .def_readwrite("n_strips", &BuildingGeometry::n_strips)
      .def("roof_major", &BuildingGeometry::roof_major);

  py::class_<LoadConfig>(m, "LoadConfig")
      .def(py::init<>())
      .def_readwrite("rho", &LoadConfig::rho)
      .def_readwrite("window_start", &LoadConfig::window_start)
      .def_readwrite("window_end", &LoadConfig::window_end)
      .def_readwrite("dt", &LoadConfig::dt)
      .def_readwrite("profile", &LoadConfig::profile)
      .def_readwrite("advection_speed", &LoadConfig::advection_speed)
      .def_readwrite("wrap_time", &LoadConfig::wrap_time);

  m.def(
      "cross_section",
      [](double z, const BuildingGeometry& g) {
        const CrossSection s = cross_section(z, g);
        return py::make_tuple(s.semi_major, s.semi_minor, s.twist);
      },
      py::arg("z"), py::arg("geometry"), "Returns (semi_major, semi_minor, twist).");
  m.def("projected_width", &projected_width, py::arg("z"), py::arg("flow_angle"),
        py::arg("geometry"));
  m.def(
      "base_moment_steady",
      [](const BuildingGeometry& g, double wx, double wy, const LoadConfig& cfg) {
        const Vec3 mvec = base_moment_steady(g, {wx, wy, 0.0}, cfg);
        return py::make_tuple(mvec.x, mvec.y, mvec.z);
      },
      py::arg("geometry"), py::arg("wind_x"), py::arg("wind_y"),
      py::arg("cfg") = LoadConfig{});
  m.def(
      "base_moment_series",
      [](const BuildingGeometry& g, const WindScenario& s, const TurbulenceBox& box,
         const LoadConfig& cfg) {
        LoadSeries series = base_moment_series(g, s, box, cfg);
        py::array_t<double> norms(static_cast<py::ssize_t>(series.moment_norm.values.size()));
        std::copy(series.moment_norm.values.begin(), series.moment_norm.values.end(),
                  norms.mutable_data());
        return py::make_tuple(series.moment_norm.start, series.moment_norm.dt, norms);
      },
      py::arg("geometry"), py::arg("scenario"), py::arg("box"), py::arg("cfg"),
      "Returns (start, dt, |M(t)| array) over the analysis window.");
}
