#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jjspd/junction.hpp"
#include "jjspd/table_io.hpp"

namespace jjspd {

/// Rates below this value are reported as exactly zero.
inline constexpr double rate_floor = 1e-30;

/// Washboard quantities at one bias current.
struct BiasPoint {
  double bias_current;      // A
  double gamma;             // I_b / I_c
  double plasma_frequency;  // rad/s, omega_p0 (1 - gamma^2)^(1/4)
  double quality_factor;    // omega_p R_n C
  double barrier;           // J, exact cubic-washboard barrier
};

/// Requires 0 <= I_b < I_c.
BiasPoint bias_point(const JunctionParams& junction, double bias_current);

/// dU = 2 E_J0 (sqrt(1 - g^2) - g arccos g), g in [0, 1].
double barrier_exact(double gamma, double josephson_energy);
/// dU ~ (4 sqrt(2) / 3) E_J0 (1 - g)^(3/2), g in [0, 1].
double barrier_approx(double gamma, double josephson_energy);

/// Effective escape temperature of the tunnelling channel,
/// hbar omega_p / (7.2 k_B (1 + 0.87 / Q)).
double mqt_escape_temperature(const JunctionParams& junction, double gamma);

// Escape rates in Hz. For gamma >= 1 the junction switches deterministically
// and every rate returns +infinity. Rates below rate_floor are flushed to 0.
double rate_ta(const JunctionParams& junction, double gamma, double temperature);
double rate_mqt(const JunctionParams& junction, double gamma);
double rate_dark(const JunctionParams& junction, double gamma, double temperature);

// Natural logs of the same rates without flushing; -inf for a zero rate.
double log_rate_ta(const JunctionParams& junction, double gamma, double temperature);
double log_rate_mqt(const JunctionParams& junction, double gamma);
double log_rate_dark(const JunctionParams& junction, double gamma, double temperature);

/// dU_r = (E_J0 Q0^2 / 2) ((I_b - I_r0) / I_c)^2.
double retrap_barrier(const JunctionParams& junction, double bias_current, double retrap_current);

/// Phase-diffusion retrapping rate at temperature T; requires I_b > I_r0.
double retrap_rate(const JunctionParams& junction, double bias_current, double retrap_current,
                   double temperature);

/// 1 - exp(-rate * duration).
double escape_probability(double rate, double duration);

/// Single-photon response parameters.
struct LightModelParams {
  double escape_temperature = 0.0;  // K, T*_esc
  double window = 0.0;              // s, dt_1
  double photon_rate = 0.0;         // Hz, absorbed photons
  std::optional<double> retrap_current;  // A, I_r0; no retrapping term when empty
};

void validate(const LightModelParams& light, const JunctionParams& junction);

/// Two-channel escape rate at the elevated temperature T*_esc.
double rate_light_escape(const JunctionParams& junction, double gamma, double escape_temperature);

struct RetrapFactor {
  double product;  // Gamma_r dt_1 before clamping (+inf when I_b <= I_r0)
  double survival; // 1 - min(product, 1)
  bool clamped;
};

RetrapFactor retrap_factor(const JunctionParams& junction, double bias_current,
                           const LightModelParams& light);

struct MeasuredRate {
  double total;       // Hz
  double dark_term;   // Gamma_dark (1 - dt_1 R)
  double light_term;  // Gamma_light dt_1 R (1 - Gamma_r dt_1)
  double retrap_product;
  bool retrap_clamped;
};

/// Switching rate of the latching readout under illumination at the
/// junction's base temperature.
MeasuredRate rate_light_measured(const JunctionParams& junction, double bias_current,
                                 const LightModelParams& light);
double log_rate_light_measured(const JunctionParams& junction, double bias_current,
                               const LightModelParams& light);

/// Probability that one absorbed photon latches the junction.
double photon_switch_probability(const JunctionParams& junction, double bias_current,
                                 const LightModelParams& light);

/// Rate vs bias with named channels. Shared export format for model curves,
/// synthetic datasets and Fulton-Dunkleberger output.
struct RateCurve {
  std::vector<double> bias_current;  // A
  std::vector<double> gamma;         // empty when I_c is unknown
  std::vector<std::pair<std::string, std::vector<double>>> channels;
  Metadata metadata;

  bool has_channel(std::string_view name) const;
  const std::vector<double>& channel(std::string_view name) const;
  std::vector<double>& add_channel(std::string name);
};

RateCurve dark_rate_curve(const JunctionParams& junction, std::span<const double> bias,
                          double temperature);
RateCurve light_rate_curve(const JunctionParams& junction, std::span<const double> bias,
                           const LightModelParams& light);

ColumnTable to_table(const RateCurve& curve);
RateCurve rate_curve_from_table(const ColumnTable& table);

}  // namespace jjspd
