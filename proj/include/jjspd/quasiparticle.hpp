#pragma once

namespace jjspd {

/// Photon-to-quasiparticle conversion and diffusion in the superconducting
/// contact. SI units.
struct QPModelParams {
  double efficiency = 0.57;   // eta, downconversion efficiency
  double gap = 0.0;           // J
  double diffusivity = 0.55e-4;  // m^2/s in NbN
  double fano_factor = 1.0;
  double distance = 100e-9;   // m, absorption site to junction
};

void validate(const QPModelParams& params);

/// N = eta E_photon / gap (not rounded).
double qp_count(double photon_energy, double gap, double efficiency);

/// Current per quasiparticle crossing a plane at distance x after time t
/// for 1D diffusion from a point source:
///   I(x, t) = e x / (4 t sqrt(pi D t)) exp(-x^2 / (4 D t)).
/// Integrates to e/2 over t. Returns 0 at t = 0.
double diffusion_current(double distance, double time, double diffusivity);

/// The expression as printed with the source: e x / (4 sqrt(pi D t)) exp(-x^2/4Dt).
/// It has units of charge, not current. Kept for comparison only; do not use
/// it in models.
[[deprecated("dimensionally a charge; use diffusion_current")]]
double diffusion_current_printed(double distance, double time, double diffusivity);

/// x^2 / D.
double diffusion_time(double distance, double diffusivity);
/// Stationary point of diffusion_current in t: x^2 / (6 D).
double diffusion_peak_time(double distance, double diffusivity);

/// S_I = 2 e F I, A^2/Hz.
double qp_shot_noise(double fano_factor, double current);

/// T* = hbar w_p / (2 k_B arccoth(1 + Q S_I / (hbar w_p^2 C))).
/// Requires S_I > 0.
double effective_temperature(double noise_density, double plasma_frequency, double quality_factor,
                             double capacitance);

/// hbar w_p / (k_B ln(2 hbar w_p^2 C / (Q S_I))), valid for weak noise.
double effective_temperature_weak_noise(double noise_density, double plasma_frequency,
                                        double quality_factor, double capacitance);

struct EffectiveTemperature {
  double temperature;  // K
  double noise_density;
  bool out_of_model;   // x^2/D shorter than 1/omega_p
};

/// T* for the shot noise of a given diffusion current, flagged when the
/// diffusion pulse is faster than the plasma oscillation.
EffectiveTemperature effective_temperature_from_current(const QPModelParams& qp,
                                                        double diffusion_current,
                                                        double plasma_frequency,
                                                        double quality_factor, double capacitance);

}  // namespace jjspd
