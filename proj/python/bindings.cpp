#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <filesystem>

#include "jjspd/analysis.hpp"
#include "jjspd/constants.hpp"
#include "jjspd/device_io.hpp"
#include "jjspd/error.hpp"
#include "jjspd/escape.hpp"
#include "jjspd/fit.hpp"
#include "jjspd/optics.hpp"
#include "jjspd/parallel.hpp"
#include "jjspd/quasiparticle.hpp"
#include "jjspd/report.hpp"
#include "jjspd/simulate.hpp"

namespace py = pybind11;
using namespace jjspd;

namespace {

double gamma_of(const JunctionParams& j, double bias) { return bias / j.critical_current; }

py::dict curve_dict(const RateCurve& c) {
  py::dict d;
  d["bias_current"] = c.bias_current;
  for (const auto& [name, values] : c.channels) {
    d[py::str(name)] = values;
  }
  py::dict meta;
  for (const auto& [k, v] : c.metadata.entries()) {
    meta[py::str(k)] = v;
  }
  d["metadata"] = meta;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Josephson-junction single-photon detector toolkit";
  m.attr("__version__") = std::string(version());

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  static py::exception<DataError> data(m, "DataError", base.ptr());
  static py::exception<DomainError> numeric(m, "NumericError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config, e.what());
    } catch (const StatisticsError& e) {
      py::set_error(data, e.what());
    } catch (const DataError& e) {
      py::set_error(data, e.what());
    } catch (const Error& e) {
      py::set_error(numeric, e.what());
    }
  });

  m.def("set_thread_limit", &set_thread_limit, py::arg("threads"));

  py::class_<JunctionParams>(m, "Junction")
      .def_readonly("critical_current", &JunctionParams::critical_current)
      .def_readonly("normal_resistance", &JunctionParams::normal_resistance)
      .def_readonly("capacitance", &JunctionParams::capacitance)
      .def_readonly("josephson_energy", &JunctionParams::josephson_energy)
      .def_readonly("plasma_frequency", &JunctionParams::plasma_frequency)
      .def_readonly("quality_factor", &JunctionParams::quality_factor)
      .def_readonly("gap", &JunctionParams::gap)
      .def_readonly("base_temperature", &JunctionParams::base_temperature)
      .def_readonly("thouless_energy", &JunctionParams::thouless_energy)
      .def_readonly("mean_free_path", &JunctionParams::mean_free_path)
      .def("with_critical_current", &with_critical_current, py::arg("critical_current"))
      .def("__repr__", [](const JunctionParams& j) {
        return "<Junction I_c=" + std::to_string(j.critical_current / units::uA) + " uA>";
      });

  m.def("make_junction", &make_junction, py::arg("critical_current"), py::arg("normal_resistance"),
        py::arg("capacitance"), py::arg("gap"), py::arg("base_temperature"),
        "Junction from SI values; E_J0, omega_p0 and Q0 are derived.");
  m.def(
      "derive_junction",
      [](const std::filesystem::path& devices, const std::string& name) {
        return derive_junction(find_device(load_devices(devices), name)).params;
      },
      py::arg("devices"), py::arg("name"));

  py::class_<LightModelParams>(m, "LightModel")
      .def(py::init([](double t, double window, double photon_rate, std::optional<double> retrap) {
             return LightModelParams{t, window, photon_rate, retrap};
           }),
           py::arg("escape_temperature"), py::arg("window"), py::arg("photon_rate") = 0.0,
           py::arg("retrap_current") = py::none())
      .def_readwrite("escape_temperature", &LightModelParams::escape_temperature)
      .def_readwrite("window", &LightModelParams::window)
      .def_readwrite("photon_rate", &LightModelParams::photon_rate)
      .def_readwrite("retrap_current", &LightModelParams::retrap_current);

  m.def("barrier_exact", &barrier_exact, py::arg("gamma"), py::arg("josephson_energy") = 1.0);
  m.def("barrier_approx", &barrier_approx, py::arg("gamma"), py::arg("josephson_energy") = 1.0);
  m.def(
      "rate_mqt", [](const JunctionParams& j, double bias) { return rate_mqt(j, gamma_of(j, bias)); },
      py::arg("junction"), py::arg("bias_current"));
  m.def(
      "rate_ta",
      [](const JunctionParams& j, double bias, double t) { return rate_ta(j, gamma_of(j, bias), t); },
      py::arg("junction"), py::arg("bias_current"), py::arg("temperature"));
  m.def(
      "rate_dark",
      [](const JunctionParams& j, double bias, std::optional<double> t) {
        return rate_dark(j, gamma_of(j, bias), t.value_or(j.base_temperature));
      },
      py::arg("junction"), py::arg("bias_current"), py::arg("temperature") = py::none());
  m.def(
      "rate_light_measured",
      [](const JunctionParams& j, double bias, const LightModelParams& light) {
        const auto r = rate_light_measured(j, bias, light);
        py::dict d;
        d["total"] = r.total;
        d["dark_term"] = r.dark_term;
        d["light_term"] = r.light_term;
        d["retrap_product"] = r.retrap_product;
        d["retrap_clamped"] = r.retrap_clamped;
        return d;
      },
      py::arg("junction"), py::arg("bias_current"), py::arg("light"));

  m.def(
      "beam_radius",
      [](double waist, double wavelength, double distance) { return beam_radius({waist, wavelength, distance}); },
      py::arg("waist"), py::arg("wavelength"), py::arg("distance"));
  m.def(
      "photon_flux_density",
      [](double waist, double wavelength, double distance, std::optional<double> energy) {
        return photon_flux_density({waist, wavelength, distance}, energy.value_or(photon_energy(wavelength)));
      },
      py::arg("waist"), py::arg("wavelength"), py::arg("distance"), py::arg("photon_energy") = py::none(),
      "Photons per second per m^2 per watt at the beam centre.");
  m.def(
      "optics_rate",
      [](const std::filesystem::path& profile_path, double ratio, double power, double waist, double wavelength,
         double distance, std::optional<double> width) {
        const auto profile = load_absorption_profile(profile_path);
        const BeamGeometry beam{waist, wavelength, distance};
        const double x = effective_length(profile, ratio);
        const double alpha = mean_absorption(profile, x, Polarization::perpendicular);
        const double w = width.value_or(profile.zone_width);
        py::dict d;
        d["effective_length"] = x;
        d["mean_alpha"] = alpha;
        d["effective_area"] = effective_area(w, x);
        d["photon_rate"] = absorbed_photon_rate(photon_flux_density(beam, photon_energy(wavelength)), w, x, alpha, power);
        return d;
      },
      py::arg("profile"), py::arg("polarization_ratio"), py::arg("power"), py::arg("waist") = 5.2e-6,
      py::arg("wavelength") = 1550e-9, py::arg("distance") = 25.4e-3, py::arg("width") = py::none());
  m.def("poisson_probabilities", &poisson_probabilities, py::arg("mean"), py::arg("k_max"));

  m.def("diffusion_current", &diffusion_current, py::arg("distance"), py::arg("time"), py::arg("diffusivity") = 0.55e-4);
  m.def("effective_temperature", &effective_temperature, py::arg("noise_density"), py::arg("plasma_frequency"),
        py::arg("quality_factor"), py::arg("capacitance"));

  m.def(
      "simulate_cw",
      [](double bias, double duration, double dead_time, double photon_rate, double dark_rate,
         double switch_probability, std::uint64_t seed) {
        return simulate_cw({bias, duration, dead_time, photon_rate, seed}, dark_rate, switch_probability).times();
      },
      py::arg("bias_current"), py::arg("duration"), py::arg("dead_time"), py::arg("photon_rate"),
      py::arg("dark_rate"), py::arg("switch_probability"), py::arg("seed"), "Switch times of a CW trace.");
  m.def(
      "simulate_ramp",
      [](const JunctionParams& j, double ramp_rate, double start, double stop, std::size_t trials, std::uint64_t seed,
         std::optional<LightModelParams> light) {
        py::gil_scoped_release release;
        return simulate_ramp({ramp_rate, start, stop, trials, seed, 10001}, j, light).switched();
      },
      py::arg("junction"), py::arg("ramp_rate"), py::arg("start"), py::arg("stop"), py::arg("trials"),
      py::arg("seed"), py::arg("light") = py::none());
  m.def(
      "simulate_pulse",
      [](const JunctionParams& j, const LightModelParams& light, double pulse_power, double pulse_duration,
         double bias, double photons_per_joule, std::size_t pulses, std::uint64_t seed) {
        PulseProtocol p;
        p.pulse_power = pulse_power;
        p.pulse_duration = pulse_duration;
        p.bias_current = bias;
        p.pulses = pulses;
        p.seed = seed;
        const auto r = simulate_pulse(p, j, light, photons_per_joule);
        py::dict d;
        d["probability"] = r.probability;
        d["error"] = r.error;
        d["switches"] = r.switches;
        d["mean_photons"] = r.mean_photons;
        d["conversion_probability"] = r.conversion_probability;
        return d;
      },
      py::arg("junction"), py::arg("light"), py::arg("pulse_power"), py::arg("pulse_duration"),
      py::arg("bias_current"), py::arg("photons_per_joule"), py::arg("pulses"), py::arg("seed"));

  py::class_<RateDataset>(m, "RateDataset")
      .def(py::init([](std::vector<double> bias, std::vector<double> rate, std::vector<double> sigma_ln,
                       double photon_rate, std::string label) {
             RateDataset d;
             d.bias_current = std::move(bias);
             d.rate = std::move(rate);
             d.sigma_ln = std::move(sigma_ln);
             d.photon_rate = photon_rate;
             d.label = std::move(label);
             return d;
           }),
           py::arg("bias_current"), py::arg("rate"), py::arg("sigma_ln"), py::arg("photon_rate") = 0.0,
           py::arg("label") = "")
      .def_readwrite("label", &RateDataset::label)
      .def_readwrite("bias_current", &RateDataset::bias_current)
      .def_readwrite("rate", &RateDataset::rate)
      .def_readwrite("sigma_ln", &RateDataset::sigma_ln)
      .def_readwrite("photon_rate", &RateDataset::photon_rate)
      .def_readwrite("power", &RateDataset::power)
      .def("__len__", [](const RateDataset& d) { return d.bias_current.size(); });

  m.def(
      "load_rate_dataset",
      [](const std::filesystem::path& path) { return dataset_from_curve(rate_curve_from_table(ColumnTable::read(path))); },
      py::arg("path"));
  m.def(
      "sample_rates",
      [](const JunctionParams& j, std::optional<LightModelParams> light, std::uint64_t seed, double rate_min,
         double rate_max, std::size_t points, double target_events) {
        auto model = [&](double ib) {
          if (ib >= j.critical_current) return std::numeric_limits<double>::infinity();
          return light ? rate_light_measured(j, ib, *light).total : rate_dark(j, ib / j.critical_current, j.base_temperature);
        };
        const auto [lo, hi] = bias_window(model, 0.5 * j.critical_current, 0.99999 * j.critical_current, rate_min, rate_max);
        const auto bias = linspace(lo, hi, points);
        std::vector<double> rate(bias.size());
        for (std::size_t i = 0; i < bias.size(); ++i) rate[i] = model(bias[i]);
        RateSamplingPlan plan;
        plan.target_events = target_events;
        auto curve = sample_rate_curve(bias, rate, plan, seed);
        curve.metadata.set("photon_rate_Hz", light ? light->photon_rate : 0.0);
        return dataset_from_curve(curve);
      },
      py::arg("junction"), py::arg("light") = py::none(), py::arg("seed") = 1, py::arg("rate_min") = 1e-2,
      py::arg("rate_max") = 3e3, py::arg("points") = 40, py::arg("target_events") = 2000.0,
      "Poisson-sampled synthetic rate curve over the bias window where the model lies in [rate_min, rate_max].");

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("kind", &FitResult::kind)
      .def_readonly("chi_square", &FitResult::chi_square)
      .def_readonly("reduced_chi_square", &FitResult::reduced_chi_square)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("flags", &FitResult::flags)
      .def_readonly("residuals", &FitResult::residuals)
      .def_property_readonly("values",
                             [](const FitResult& f) {
                               py::dict d;
                               for (const auto& p : f.parameters) d[py::str(p.name)] = p.value;
                               return d;
                             })
      .def_property_readonly("uncertainties",
                             [](const FitResult& f) {
                               py::dict d;
                               for (const auto& p : f.parameters) d[py::str(p.name)] = p.uncertainty;
                               return d;
                             })
      .def_property_readonly("diagnostics",
                             [](const FitResult& f) {
                               py::dict d;
                               for (const auto& [k, v] : f.diagnostics) d[py::str(k)] = v;
                               return d;
                             })
      .def("value", &FitResult::value, py::arg("name"))
      .def("to_json", [](const FitResult& f) { return to_json(f).dump(2); });

  m.def(
      "fit_dark",
      [](const RateDataset& data, const JunctionParams& j) {
        py::gil_scoped_release release;
        auto r = fit_dark(data, j);
        return std::make_pair(r.fit, r.junction);
      },
      py::arg("data"), py::arg("junction"), "Returns (fit, junction with the fitted I_c).");
  m.def(
      "fit_light",
      [](const std::vector<RateDataset>& data, const JunctionParams& j) {
        py::gil_scoped_release release;
        return fit_light(data, j);
      },
      py::arg("data"), py::arg("junction"));
  m.def(
      "fit_light_retrap",
      [](const std::vector<RateDataset>& data, const JunctionParams& j) {
        py::gil_scoped_release release;
        return fit_light_retrap(data, j);
      },
      py::arg("data"), py::arg("junction"));
  m.def(
      "fit_gate_joint",
      [](const std::vector<std::tuple<std::string, JunctionParams, std::vector<RateDataset>>>& gates) {
        std::vector<GateData> g;
        for (const auto& [label, j, curves] : gates) g.push_back({label, j, curves});
        py::gil_scoped_release release;
        return fit_gate_joint(g);
      },
      py::arg("gates"), "gates: list of (label, junction, [datasets]).");

  m.def(
      "variance_mean_test",
      [](const std::vector<std::int64_t>& counts, double confidence) {
        const auto t = variance_mean_test(counts, confidence);
        py::dict d;
        d["ratio"] = t.ratio;
        d["lower"] = t.lower;
        d["upper"] = t.upper;
        d["verdict"] = t.verdict == Dispersion::poissonian       ? "poissonian"
                       : t.verdict == Dispersion::sub_poissonian ? "sub_poissonian"
                                                                 : "super_poissonian";
        return d;
      },
      py::arg("counts"), py::arg("confidence") = 0.99);
  m.def(
      "fd_transform",
      [](const std::vector<double>& samples, double ramp_rate, std::size_t bins) {
        return curve_dict(fd_transform(samples, ramp_rate, bins));
      },
      py::arg("samples"), py::arg("ramp_rate"), py::arg("bins") = 200);
}
