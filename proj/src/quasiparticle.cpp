#include "jjspd/quasiparticle.hpp"

#include <cmath>

#include "jjspd/constants.hpp"
#include "jjspd/error.hpp"

namespace jjspd {

using namespace constants;

void validate(const QPModelParams& p) {
  if (!(p.efficiency > 0.0 && p.efficiency <= 1.0)) {
    throw DomainError("downconversion efficiency must lie in (0, 1]");
  }
  detail::require_positive(p.gap, "gap");
  detail::require_positive(p.diffusivity, "diffusivity");
  detail::require_positive(p.fano_factor, "Fano factor");
  detail::require_positive(p.distance, "source distance");
}

double qp_count(double photon_energy, double gap, double efficiency) {
  detail::require_positive(photon_energy, "photon energy");
  detail::require_positive(gap, "gap");
  detail::require_positive(efficiency, "efficiency");
  return efficiency * photon_energy / gap;
}

double diffusion_current(double distance, double time, double diffusivity) {
  detail::require_positive(distance, "distance");
  detail::require_positive(diffusivity, "diffusivity");
  detail::require_non_negative(time, "time");
  if (time == 0.0) {
    return 0.0;
  }
  const double dt = diffusivity * time;
  return elementary_charge * distance / (4.0 * time * std::sqrt(pi * dt)) *
         std::exp(-distance * distance / (4.0 * dt));
}

double diffusion_current_printed(double distance, double time, double diffusivity) {
  detail::require_positive(distance, "distance");
  detail::require_positive(diffusivity, "diffusivity");
  detail::require_non_negative(time, "time");
  if (time == 0.0) {
    return 0.0;
  }
  const double dt = diffusivity * time;
  return elementary_charge / (4.0 * std::sqrt(pi * dt)) * distance *
         std::exp(-distance * distance / (4.0 * dt));
}

double diffusion_time(double distance, double diffusivity) {
  detail::require_positive(distance, "distance");
  detail::require_positive(diffusivity, "diffusivity");
  return distance * distance / diffusivity;
}

double diffusion_peak_time(double distance, double diffusivity) {
  return diffusion_time(distance, diffusivity) / 6.0;
}

double qp_shot_noise(double fano_factor, double current) {
  detail::require_non_negative(fano_factor, "Fano factor");
  detail::require_non_negative(current, "current");
  return 2.0 * elementary_charge * fano_factor * current;
}

double effective_temperature(double noise_density, double plasma_frequency, double quality_factor,
                             double capacitance) {
  if (!(noise_density > 0.0)) {
    throw DomainError("effective temperature needs a positive noise density (arccoth(1) diverges)");
  }
  detail::require_positive(plasma_frequency, "plasma frequency");
  detail::require_positive(quality_factor, "quality factor");
  detail::require_positive(capacitance, "capacitance");
  const double y = quality_factor * noise_density /
                   (hbar * plasma_frequency * plasma_frequency * capacitance);
  // arccoth(1 + y) = 0.5 ln((2 + y) / y)
  const double arccoth = 0.5 * std::log1p(2.0 / y);
  return hbar * plasma_frequency / (boltzmann * 2.0 * arccoth);
}

double effective_temperature_weak_noise(double noise_density, double plasma_frequency,
                                        double quality_factor, double capacitance) {
  detail::require_positive(noise_density, "noise density");
  return hbar * plasma_frequency /
         (boltzmann * std::log(2.0 * hbar * plasma_frequency * plasma_frequency * capacitance /
                               (quality_factor * noise_density)));
}

EffectiveTemperature effective_temperature_from_current(const QPModelParams& qp,
                                                        double diffusion_current,
                                                        double plasma_frequency,
                                                        double quality_factor, double capacitance) {
  validate(qp);
  const double s = qp_shot_noise(qp.fano_factor, diffusion_current);
  return {effective_temperature(s, plasma_frequency, quality_factor, capacitance), s,
          diffusion_time(qp.distance, qp.diffusivity) < 1.0 / plasma_frequency};
}

}  // namespace jjspd
