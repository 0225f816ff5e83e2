#pragma once

#include <optional>
#include <string>

namespace jjspd {

/// Measured description of one graphene junction, one record per device.
/// All quantities are SI.
struct DeviceConfig {
  std::string name;
  double width = 0.0;                    // m
  double channel_length_measured = 0.0;  // m
  double channel_length_design = 0.0;    // m, used for the Thouless energy
  int graphene_layers = 1;
  double normal_resistance = 0.0;        // Ohm
  double gap = 0.0;                      // J
  double electron_density = 0.0;         // m^-2
  double mobility = 0.0;                 // m^2 / (V s)
  double fermi_velocity = 1e6;           // m / s
  std::optional<double> v_cnp;           // V
  std::optional<double> polarization_ratio;
  double base_temperature = 0.0;         // K

  // Optional measured/fitted values carried alongside the static record.
  std::optional<double> critical_current;        // A
  std::optional<double> capacitance;             // F, replaces the Thouless estimate
  std::optional<double> mean_switching_current;  // A
};

/// Throws ConfigError naming the first offending field.
void validate(const DeviceConfig& device);

/// Static junction parameters in SI units. Construct through
/// make_junction() or derive_junction() so the derived fields stay
/// consistent with critical_current, normal_resistance and capacitance.
struct JunctionParams {
  double critical_current = 0.0;   // A
  double normal_resistance = 0.0;  // Ohm
  double capacitance = 0.0;        // F
  double josephson_energy = 0.0;   // J, E_J0 = hbar I_c / 2e
  double plasma_frequency = 0.0;   // rad/s, zero-bias
  double quality_factor = 0.0;     // zero-bias, omega_p0 R_n C
  double gap = 0.0;                // J
  double base_temperature = 0.0;   // K
  double thouless_energy = 0.0;    // J, 0 when not derived
  double diffusivity = 0.0;        // m^2/s, 0 when not derived
  double mean_free_path = 0.0;     // m, 0 when not derived
};

/// l = (hbar/e) mu sqrt(pi n) for a 2D Drude metal.
double derive_mean_free_path(double electron_density, double mobility);

struct DiffusionThouless {
  double diffusivity;      // m^2/s
  double thouless_energy;  // J
};

DiffusionThouless derive_diffusion_and_thouless(double mean_free_path, double fermi_velocity,
                                                double length);

/// C = hbar / (R_n E_Th).
double derive_capacitance(double normal_resistance, double thouless_energy);

struct PlasmaQuality {
  double plasma_frequency;  // rad/s
  double quality_factor;
  double josephson_energy;  // J
};

PlasmaQuality derive_plasma_and_quality(double critical_current, double capacitance,
                                        double normal_resistance);

JunctionParams make_junction(double critical_current, double normal_resistance, double capacitance,
                             double gap, double base_temperature);

/// Same junction with a different critical current; E_J0, omega_p0 and Q0 are
/// recomputed, everything else is kept.
JunctionParams with_critical_current(const JunctionParams& junction, double critical_current);

struct JunctionDerivation {
  JunctionParams params;
  double thouless_capacitance = 0.0;  // F, hbar / (R_n E_Th)
  bool capacitance_overridden = false;
};

/// Full derivation chain from a device record. Requires critical_current.
JunctionDerivation derive_junction(const DeviceConfig& device);

}  // namespace jjspd
