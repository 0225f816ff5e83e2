#include "jjspd/optics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "jjspd/constants.hpp"
#include "jjspd/error.hpp"

namespace jjspd {

using namespace constants;

void validate(const BeamGeometry& g) {
  detail::require_positive(g.waist, "beam waist");
  detail::require_positive(g.wavelength, "wavelength");
  detail::require_non_negative(g.distance, "fiber distance");
}

double rayleigh_range(const BeamGeometry& g) {
  validate(g);
  return pi * g.waist * g.waist / g.wavelength;
}

double beam_radius(const BeamGeometry& g) {
  const double ratio = g.distance / rayleigh_range(g);
  return g.waist * std::sqrt(1.0 + ratio * ratio);
}

double center_intensity(const BeamGeometry& g, double laser_power) {
  detail::require_non_negative(laser_power, "laser power");
  const double w = beam_radius(g);
  return 2.0 * laser_power / (pi * w * w);
}

double intensity(const BeamGeometry& g, double laser_power, double radius) {
  const double w = beam_radius(g);
  return center_intensity(g, laser_power) * std::exp(-2.0 * radius * radius / (w * w));
}

double photon_energy(double wavelength) {
  detail::require_positive(wavelength, "wavelength");
  return planck * speed_of_light / wavelength;
}

double photon_flux_density(const BeamGeometry& g, double photon_energy) {
  detail::require_positive(photon_energy, "photon energy");
  return center_intensity(g, 1.0) / photon_energy;
}

void validate(const AbsorptionProfile& p) {
  if (p.x.size() < 2) {
    throw DataError("absorption profile needs at least two grid points");
  }
  if (p.perp.size() != p.x.size() || p.par.size() != p.x.size()) {
    throw DataError("absorption profile columns have different lengths");
  }
  if (p.x.front() < 0.0) {
    throw DataError("absorption profile grid must start at x >= 0");
  }
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    if (i > 0 && !(p.x[i] > p.x[i - 1])) {
      throw DataError(fmt::format("absorption profile grid is not strictly increasing at row {}", i + 1));
    }
    if (!(p.perp[i] >= 0.0 && p.perp[i] <= 1.0 && p.par[i] >= 0.0 && p.par[i] <= 1.0)) {
      throw DataError(fmt::format("absorption coefficient outside [0, 1] at row {}", i + 1));
    }
  }
}

ColumnTable to_table(const AbsorptionProfile& p) {
  ColumnTable table({"x_nm", "alpha_perp", "alpha_par"});
  table.metadata().set("zone_length_nm", p.zone_length / units::nm);
  table.metadata().set("zone_width_um", p.zone_width / units::um);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double row[] = {p.x[i] / units::nm, p.perp[i], p.par[i]};
    table.add_row(row);
  }
  return table;
}

AbsorptionProfile absorption_profile_from_table(const ColumnTable& table) {
  AbsorptionProfile p;
  p.x = table.numeric_column("x_nm");
  for (double& x : p.x) {
    x *= units::nm;
  }
  p.perp = table.numeric_column("alpha_perp");
  p.par = table.numeric_column("alpha_par");
  if (auto v = table.metadata().get_number("zone_length_nm")) {
    p.zone_length = *v * units::nm;
  }
  if (auto v = table.metadata().get_number("zone_width_um")) {
    p.zone_width = *v * units::um;
  }
  validate(p);
  return p;
}

AbsorptionProfile load_absorption_profile(const std::filesystem::path& path) {
  return absorption_profile_from_table(ColumnTable::read(path));
}

namespace {

struct Integrals {
  double perp;
  double par;
};

// Trapezoid integrals of both profiles from x0 to x.
Integrals integrate_to(const AbsorptionProfile& p, double x) {
  if (x < p.x.front() || x > p.x.back()) {
    throw DomainError(fmt::format("x = {} m is outside the profile grid [{}, {}] m", x, p.x.front(),
                                  p.x.back()));
  }
  Integrals acc{0.0, 0.0};
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double x0 = p.x[i - 1];
    if (x <= x0) {
      break;
    }
    const double x1 = std::min(x, p.x[i]);
    const double f = (x1 - x0) / (p.x[i] - x0);
    const double perp1 = p.perp[i - 1] + f * (p.perp[i] - p.perp[i - 1]);
    const double par1 = p.par[i - 1] + f * (p.par[i] - p.par[i - 1]);
    acc.perp += 0.5 * (p.perp[i - 1] + perp1) * (x1 - x0);
    acc.par += 0.5 * (p.par[i - 1] + par1) * (x1 - x0);
  }
  return acc;
}

double contrast(double perp, double par) {
  const double sum = perp + par;
  if (!(sum > 0.0)) {
    throw DomainError("polarization ratio undefined where both absorption coefficients vanish");
  }
  return (perp - par) / sum;
}

}  // namespace

double polarization_ratio_cumulative(const AbsorptionProfile& p, double x) {
  const auto s = integrate_to(p, x);
  if (x == p.x.front()) {
    return contrast(p.perp.front(), p.par.front());
  }
  return contrast(s.perp, s.par);
}

std::vector<double> polarization_ratio_curve(const AbsorptionProfile& p) {
  std::vector<double> out(p.size());
  double perp = 0.0;
  double par = 0.0;
  out[0] = contrast(p.perp[0], p.par[0]);
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double dx = p.x[i] - p.x[i - 1];
    perp += 0.5 * (p.perp[i - 1] + p.perp[i]) * dx;
    par += 0.5 * (p.par[i - 1] + p.par[i]) * dx;
    out[i] = contrast(perp, par);
  }
  return out;
}

double effective_length(const AbsorptionProfile& p, double target_ratio) {
  const auto ratio = polarization_ratio_curve(p);
  if (target_ratio >= ratio.front()) {
    return p.x.front();
  }
  for (std::size_t k = 1; k < ratio.size(); ++k) {
    if (ratio[k] <= target_ratio) {
      const double f = (ratio[k - 1] - target_ratio) / (ratio[k - 1] - ratio[k]);
      return p.x[k - 1] + f * (p.x[k] - p.x[k - 1]);
    }
  }
  throw NoSolutionError(fmt::format(
      "polarization ratio never falls to {} on the profile grid (minimum reached {})", target_ratio,
      *std::min_element(ratio.begin(), ratio.end())));
}

double mean_absorption(const AbsorptionProfile& p, double x, Polarization polarization) {
  const auto s = integrate_to(p, x);
  const auto& alpha = polarization == Polarization::perpendicular ? p.perp : p.par;
  if (x == p.x.front()) {
    return alpha.front();
  }
  const double integral = polarization == Polarization::perpendicular ? s.perp : s.par;
  return integral / (x - p.x.front());
}

double effective_area(double width, double effective_length) {
  detail::require_positive(width, "width");
  detail::require_positive(effective_length, "effective length");
  return 2.0 * width * effective_length;
}

double absorbed_photon_rate(double flux_density_per_watt, double width, double effective_length,
                            double mean_alpha, double laser_power) {
  detail::require_positive(flux_density_per_watt, "photon flux density");
  detail::require_positive(mean_alpha, "mean absorption");
  detail::require_non_negative(laser_power, "laser power");
  return flux_density_per_watt * effective_area(width, effective_length) * mean_alpha * laser_power;
}

double mean_photon_number(double photon_rate, double window) {
  detail::require_non_negative(photon_rate, "photon rate");
  detail::require_non_negative(window, "time window");
  return photon_rate * window;
}

double pulse_photon_number(double pulse_power, double pulse_duration, double flux_density_per_watt,
                           double effective_area, double mean_alpha) {
  detail::require_non_negative(pulse_power, "pulse power");
  detail::require_non_negative(pulse_duration, "pulse duration");
  detail::require_non_negative(flux_density_per_watt, "photon flux density");
  detail::require_non_negative(effective_area, "effective area");
  detail::require_non_negative(mean_alpha, "mean absorption");
  return flux_density_per_watt * effective_area * mean_alpha * pulse_power * pulse_duration;
}

std::vector<double> poisson_probabilities(double mean, int k_max) {
  detail::require_non_negative(mean, "Poisson mean");
  if (k_max < 0) {
    throw DomainError("k_max must be non-negative");
  }
  std::vector<double> out(static_cast<std::size_t>(k_max) + 1);
  double term = std::exp(-mean);
  for (int k = 0; k <= k_max; ++k) {
    out[static_cast<std::size_t>(k)] = term;
    term *= mean / (k + 1);
  }
  return out;
}

}  // namespace jjspd
