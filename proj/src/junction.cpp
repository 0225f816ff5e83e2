#include "jjspd/junction.hpp"

#include <cmath>

#include "jjspd/constants.hpp"
#include "jjspd/error.hpp"

namespace jjspd {

using namespace constants;

void validate(const DeviceConfig& d) {
  auto positive = [&](double v, const char* field) {
    if (!(v > 0.0)) {
      throw ConfigError("device '" + d.name + "': field '" + field + "' must be positive");
    }
  };
  if (d.name.empty()) {
    throw ConfigError("device record without a name");
  }
  positive(d.width, "width");
  positive(d.channel_length_measured, "channel_length_measured");
  positive(d.channel_length_design, "channel_length_design");
  positive(d.normal_resistance, "normal_resistance");
  positive(d.gap, "gap");
  positive(d.electron_density, "electron_density");
  positive(d.mobility, "mobility");
  positive(d.fermi_velocity, "fermi_velocity");
  positive(d.base_temperature, "base_temperature");
  if (d.graphene_layers < 1) {
    throw ConfigError("device '" + d.name + "': field 'graphene_layers' must be >= 1");
  }
  if (d.channel_length_design < d.channel_length_measured) {
    throw ConfigError("device '" + d.name +
                      "': channel_length_design must not be shorter than channel_length_measured");
  }
  if (d.polarization_ratio && (*d.polarization_ratio < 0.0 || *d.polarization_ratio > 1.0)) {
    throw ConfigError("device '" + d.name + "': field 'polarization_ratio' must lie in [0, 1]");
  }
  if (d.critical_current) {
    positive(*d.critical_current, "critical_current");
  }
  if (d.capacitance) {
    positive(*d.capacitance, "capacitance");
  }
}

double derive_mean_free_path(double electron_density, double mobility) {
  detail::require_positive(electron_density, "electron density");
  detail::require_positive(mobility, "mobility");
  return hbar / elementary_charge * mobility * std::sqrt(pi * electron_density);
}

DiffusionThouless derive_diffusion_and_thouless(double mean_free_path, double fermi_velocity,
                                                double length) {
  detail::require_positive(mean_free_path, "mean free path");
  detail::require_positive(fermi_velocity, "Fermi velocity");
  detail::require_positive(length, "junction length");
  const double diffusivity = fermi_velocity * mean_free_path / 2.0;
  return {diffusivity, hbar * diffusivity / (length * length)};
}

double derive_capacitance(double normal_resistance, double thouless_energy) {
  detail::require_positive(normal_resistance, "normal resistance");
  detail::require_positive(thouless_energy, "Thouless energy");
  return hbar / (normal_resistance * thouless_energy);
}

PlasmaQuality derive_plasma_and_quality(double critical_current, double capacitance,
                                        double normal_resistance) {
  detail::require_positive(critical_current, "critical current");
  detail::require_positive(capacitance, "capacitance");
  detail::require_positive(normal_resistance, "normal resistance");
  const double wp0 = std::sqrt(2.0 * elementary_charge * critical_current / (hbar * capacitance));
  return {wp0, wp0 * normal_resistance * capacitance,
          hbar * critical_current / (2.0 * elementary_charge)};
}

JunctionParams make_junction(double critical_current, double normal_resistance, double capacitance,
                             double gap, double base_temperature) {
  detail::require_non_negative(gap, "gap");
  detail::require_positive(base_temperature, "base temperature");
  const auto pq = derive_plasma_and_quality(critical_current, capacitance, normal_resistance);
  JunctionParams j;
  j.critical_current = critical_current;
  j.normal_resistance = normal_resistance;
  j.capacitance = capacitance;
  j.josephson_energy = pq.josephson_energy;
  j.plasma_frequency = pq.plasma_frequency;
  j.quality_factor = pq.quality_factor;
  j.gap = gap;
  j.base_temperature = base_temperature;
  return j;
}

JunctionParams with_critical_current(const JunctionParams& junction, double critical_current) {
  JunctionParams j = junction;
  const auto pq = derive_plasma_and_quality(critical_current, j.capacitance, j.normal_resistance);
  j.critical_current = critical_current;
  j.josephson_energy = pq.josephson_energy;
  j.plasma_frequency = pq.plasma_frequency;
  j.quality_factor = pq.quality_factor;
  return j;
}

JunctionDerivation derive_junction(const DeviceConfig& device) {
  validate(device);
  if (!device.critical_current) {
    throw ConfigError("device '" + device.name +
                      "': field 'critical_current' is required to derive junction parameters");
  }
  const double mfp = derive_mean_free_path(device.electron_density, device.mobility);
  const auto dt = derive_diffusion_and_thouless(mfp, device.fermi_velocity, device.channel_length_design);
  const double c_thouless = derive_capacitance(device.normal_resistance, dt.thouless_energy);

  JunctionDerivation out;
  out.thouless_capacitance = c_thouless;
  out.capacitance_overridden = device.capacitance.has_value();
  const double c = device.capacitance.value_or(c_thouless);
  out.params = make_junction(*device.critical_current, device.normal_resistance, c, device.gap,
                             device.base_temperature);
  out.params.mean_free_path = mfp;
  out.params.diffusivity = dt.diffusivity;
  out.params.thouless_energy = dt.thouless_energy;
  return out;
}

}  // namespace jjspd
