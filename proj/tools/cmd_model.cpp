#include <iostream>

#include <fmt/format.h>

#include "commands.hpp"
#include "common.hpp"
#include "jjspd/constants.hpp"
#include "jjspd/device_io.hpp"
#include "jjspd/error.hpp"
#include "jjspd/optics.hpp"
#include "jjspd/report.hpp"
#include "jjspd/simulate.hpp"

namespace jjspd::cli {

namespace {

void run_derive(const Settings& s) {
  auto devices = load_devices(s.get_path("devices"));
  if (auto name = s.maybe_text("device")) {
    devices = {find_device(devices, *name)};
  }
  nlohmann::json rows = nlohmann::json::array();
  for (auto device : devices) {
    if (auto ic = s.maybe_number("critical_current_uA")) {
      device.critical_current = *ic * units::uA;
    }
    const auto d = derive_junction(device);
    const auto& p = d.params;
    nlohmann::json row = {
        {"name", device.name},
        {"mean_free_path_nm", p.mean_free_path / units::nm},
        {"diffusivity_m2_per_s", p.diffusivity},
        {"thouless_energy_meV", p.thouless_energy / units::meV},
        {"thouless_capacitance_fF", d.thouless_capacitance / units::fF},
        {"capacitance_fF", p.capacitance / units::fF},
        {"capacitance_overridden", d.capacitance_overridden},
        {"critical_current_uA", p.critical_current / units::uA},
        {"normal_resistance_ohm", p.normal_resistance},
        {"icrn_ueV", p.critical_current * p.normal_resistance / units::ueV * constants::elementary_charge},
        {"josephson_energy_meV", p.josephson_energy / units::meV},
        {"plasma_frequency_GHz", p.plasma_frequency / (2.0 * constants::pi) / units::GHz},
        {"quality_factor", p.quality_factor},
        {"junction", to_json(p)},
    };
    std::cout << fmt::format("device {}: l_mfp = {:.1f} nm, E_Th = {:.3f} meV, C = {:.1f} fF, "
                             "w_p0/2pi = {:.0f} GHz, Q0 = {:.2f}, E_J0 = {:.1f} meV\n",
                             device.name, p.mean_free_path / units::nm, p.thouless_energy / units::meV,
                             p.capacitance / units::fF, p.plasma_frequency / (2.0 * constants::pi) / units::GHz,
                             p.quality_factor, p.josephson_energy / units::meV);
    rows.push_back(std::move(row));
  }
  write_report(s, "derive.json", {{"devices", rows}}, std::nullopt);
}

void run_rates(const Settings& s) {
  const auto j = selected_junction(s);
  const auto light = selected_light(s);
  const double lo = s.maybe_number("from_uA").value_or(0.8 * j.critical_current / units::uA) * units::uA;
  const double hi = s.maybe_number("to_uA").value_or(0.999 * j.critical_current / units::uA) * units::uA;
  const auto bias = linspace(lo, hi, s.get_integer("points"));
  const auto curve = light ? light_rate_curve(j, bias, *light) : dark_rate_curve(j, bias, j.base_temperature);
  auto table = to_table(curve);
  table.metadata().set("device", s.get_text("device"));
  write_table(s, "rates.csv", std::move(table), std::nullopt);
}

void run_optics(const Settings& s) {
  const auto profile = load_absorption_profile(s.get_path("profile"));
  BeamGeometry beam{s.get_number("waist_um") * units::um, s.get_number("wavelength_nm") * units::nm,
                    s.get_number("distance_mm") * units::mm};
  const double e_ph = s.maybe_number("photon_energy_eV").value_or(photon_energy(beam.wavelength) / units::eV) * units::eV;
  const double flux = photon_flux_density(beam, e_ph);
  const double width = s.maybe_number("width_um").value_or(profile.zone_width / units::um) * units::um;
  const double ratio = s.get_number("polarization_ratio");
  const double x_eff = effective_length(profile, ratio);
  const double alpha = mean_absorption(profile, x_eff, Polarization::perpendicular);
  const double power = s.get_number("power_pW") * units::pW;
  const double area = effective_area(width, x_eff);
  const double rate = absorbed_photon_rate(flux, width, x_eff, alpha, power);

  nlohmann::json body = {
      {"rayleigh_range_um", rayleigh_range(beam) / units::um},
      {"beam_radius_mm", beam_radius(beam) / units::mm},
      {"center_intensity_pW_per_mm2", center_intensity(beam, power) / (units::pW / (units::mm * units::mm))},
      {"photon_energy_eV", e_ph / units::eV},
      {"photon_flux_per_um2_per_s_per_100pW", flux * 100.0 * units::pW * units::um * units::um},
      {"polarization_ratio", ratio},
      {"effective_length_nm", x_eff / units::nm},
      {"mean_alpha_perp", alpha},
      {"effective_area_um2", area / (units::um * units::um)},
      {"laser_power_pW", power / units::pW},
      {"absorbed_photon_rate_Hz", rate},
  };
  std::cout << fmt::format("x_eff = {:.1f} nm, <alpha> = {:.3f}, A_eff = {:.3f} um^2, R_photon = {:.2f} Hz\n",
                           x_eff / units::nm, alpha, area / (units::um * units::um), rate);
  if (auto fj = s.maybe_number("pulse_energy_fJ")) {
    const double n = flux * area * alpha * *fj * units::fJ;
    const auto p = poisson_probabilities(n, 2);
    body["pulse"] = {{"energy_fJ", *fj}, {"mean_photons", n}, {"p0", p[0]}, {"p1", p[1]}, {"p2", p[2]}};
    std::cout << fmt::format("N_pulse = {:.4f}, P(0,1,2) = {:.4f} {:.4f} {:.4f}\n", n, p[0], p[1], p[2]);
  }
  write_report(s, "optics.json", std::move(body), std::nullopt);
}

}  // namespace

void add_model_commands(CLI::App& app, Store& store) {
  {
    auto* sub = app.add_subcommand("derive", "Derived junction parameters for device records");
    auto& s = *store.emplace_back(std::make_unique<Settings>(*sub, "derive"));
    device_options(s);
    sub->callback([&s] {
      s.resolve();
      run_derive(s);
    });
  }
  {
    auto* sub = app.add_subcommand("rates", "Model escape-rate curve vs bias");
    auto& s = *store.emplace_back(std::make_unique<Settings>(*sub, "rates"));
    device_options(s);
    light_options(s);
    s.number("from_uA", std::nullopt, "First bias [uA] (default 0.8 I_c)");
    s.number("to_uA", std::nullopt, "Last bias [uA] (default 0.999 I_c)");
    s.integer("points", 200, "Bias points");
    sub->callback([&s] {
      s.resolve();
      run_rates(s);
    });
  }
  {
    auto* sub = app.add_subcommand("optics", "Photon flux, effective area and absorbed photon rate");
    auto& s = *store.emplace_back(std::make_unique<Settings>(*sub, "optics"));
    s.path("profile", std::nullopt, "Absorption profile (CSV)");
    s.number("waist_um", 5.2, "Beam waist at the fibre end [um]");
    s.number("wavelength_nm", 1550.0, "Wavelength [nm]");
    s.number("distance_mm", 25.4, "Fibre-to-device distance [mm]");
    s.number("photon_energy_eV", std::nullopt, "Photon energy [eV] (default hc/lambda)");
    s.number("width_um", std::nullopt, "Junction width [um] (default profile zone width)");
    s.number("polarization_ratio", std::nullopt, "Measured polarization ratio");
    s.number("power_pW", 100.0, "Laser power [pW]");
    s.number("pulse_energy_fJ", std::nullopt, "Pulse energy [fJ] for the photon-number split");
    sub->callback([&s] {
      s.resolve();
      run_optics(s);
    });
  }
}

}  // namespace jjspd::cli
