#pragma once

#include <filesystem>
#include <vector>

#include "jjspd/table_io.hpp"

namespace jjspd {

/// Fiber-to-device Gaussian beam. Lengths in metres.
struct BeamGeometry {
  double waist = 0.0;       // w0 at the fiber end
  double wavelength = 0.0;  // lambda
  double distance = 0.0;    // z, fiber end to device
};

void validate(const BeamGeometry& geometry);

double rayleigh_range(const BeamGeometry& geometry);
double beam_radius(const BeamGeometry& geometry);

/// Peak intensity 2P / (pi w(z)^2) in W/m^2; the device sits on the beam axis.
double center_intensity(const BeamGeometry& geometry, double laser_power);
/// Radial profile I(r) at the device plane, W/m^2.
double intensity(const BeamGeometry& geometry, double laser_power, double radius);

/// hc / lambda, J.
double photon_energy(double wavelength);

/// Incident photons per second per m^2 per watt of laser power at the beam
/// centre.
double photon_flux_density(const BeamGeometry& geometry, double photon_energy);

enum class Polarization { perpendicular, parallel };

/// Volumetric absorption alpha(x) for both polarizations versus distance
/// from the graphene/superconductor interface. Illustrative tabulated data.
struct AbsorptionProfile {
  std::vector<double> x;      // m, strictly increasing
  std::vector<double> perp;   // alpha for E perpendicular to the supercurrent
  std::vector<double> par;    // alpha for E parallel to the supercurrent
  double zone_length = 50e-9; // m
  double zone_width = 0.0;    // m, junction width

  std::size_t size() const { return x.size(); }
};

void validate(const AbsorptionProfile& profile);

AbsorptionProfile load_absorption_profile(const std::filesystem::path& path);
ColumnTable to_table(const AbsorptionProfile& profile);
AbsorptionProfile absorption_profile_from_table(const ColumnTable& table);

/// [int_0^x (a_perp - a_par)] / [int_0^x (a_perp + a_par)] by the trapezoid
/// rule with linear interpolation; the x -> x0 limit is the local contrast.
double polarization_ratio_cumulative(const AbsorptionProfile& profile, double x);

/// Ratio at every grid point.
std::vector<double> polarization_ratio_curve(const AbsorptionProfile& profile);

/// Smallest x at which the cumulative ratio has fallen to `target`,
/// interpolated between grid points. Throws NoSolutionError when the profile
/// never reaches the target.
double effective_length(const AbsorptionProfile& profile, double target_ratio);

/// Mean of alpha over [x0, x].
double mean_absorption(const AbsorptionProfile& profile, double x, Polarization polarization);

/// Two contacts, each `width` wide and absorbing within `effective_length`.
double effective_area(double width, double effective_length);

/// R = J A_eff <alpha> P, photons absorbed per second.
double absorbed_photon_rate(double flux_density_per_watt, double width, double effective_length,
                            double mean_alpha, double laser_power);

/// <N> = R t.
double mean_photon_number(double photon_rate, double window);

/// N = J A_eff <alpha> P t.
double pulse_photon_number(double pulse_power, double pulse_duration, double flux_density_per_watt,
                           double effective_area, double mean_alpha);

/// e^-mu mu^k / k! for k = 0..k_max.
std::vector<double> poisson_probabilities(double mean, int k_max);

}  // namespace jjspd
