#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "jjspd/escape.hpp"
#include "jjspd/junction.hpp"
#include "jjspd/table_io.hpp"

namespace jjspd {

enum class EventKind { dark, photon, pulse };

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view text);

struct SwitchEvent {
  double time;  // s
  EventKind kind;
  std::int64_t pulse_index = -1;
};

/// Latching switch events, strictly increasing in time.
struct EventTrace {
  std::vector<SwitchEvent> events;
  double duration = 0.0;  // s
  std::uint64_t seed = 0;
  Metadata metadata;

  std::vector<double> times() const;
};

ColumnTable to_table(const EventTrace& trace);
EventTrace event_trace_from_table(const ColumnTable& table);

/// Continuous illumination at fixed bias.
struct CWProtocol {
  double bias_current = 0.0;  // A
  double duration = 0.0;      // s
  double dead_time = 1e-3;    // s, latch reset after each switch
  double photon_rate = 0.0;   // Hz, absorbed photons
  std::uint64_t seed = 0;
};

void validate(const CWProtocol& protocol);

/// Dark escapes (stream 0) and photon arrivals (stream 1) are independent
/// Poisson processes; each photon latches with `switch_probability`
/// (stream 2). Candidates falling inside the dead time after a switch are
/// lost.
EventTrace simulate_cw(const CWProtocol& protocol, double dark_rate, double switch_probability);

/// Rates from the escape model at protocol.bias_current. Without a light
/// model only dark escapes occur. The photon rate is taken from the protocol.
EventTrace simulate_cw(const CWProtocol& protocol, const JunctionParams& junction,
                       const std::optional<LightModelParams>& light);

/// Linear bias ramp from start to stop, repeated for independent trials.
struct RampProtocol {
  double ramp_rate = 0.0;  // A/s
  double start = 0.0;      // A
  double stop = 0.0;       // A
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t grid_points = 10001;  // hazard grid, step <= (stop - start) / 1e4
};

void validate(const RampProtocol& protocol);

struct RampSamples {
  /// Switching current per trial; empty when the junction never switched.
  std::vector<std::optional<double>> switching_current;
  std::uint64_t seed = 0;
  Metadata metadata;

  std::vector<double> switched() const;
  std::size_t no_switch_count() const;
};

/// Survival S(I) = exp(-H(I)), H(I) = (1/ramp) int_start^I Gamma, on a grid.
struct SwitchingDensity {
  std::vector<double> current;
  std::vector<double> density;    // 1/A
  std::vector<double> survival;
  std::vector<double> cumulative_hazard;

  /// Probability of switching within the grid, 1 - S(stop).
  double switched_fraction() const { return 1.0 - survival.back(); }
};

/// p(I) = Gamma(I)/(dI/dt) exp(-H(I)). Trapezoid hazard on the given grid.
SwitchingDensity switching_density_from_rate(std::span<const double> current,
                                             std::span<const double> rate, double ramp_rate);

/// Inverse-CDF sampling of the first switching current per trial. Trial i
/// draws from sub-stream i of protocol.seed.
RampSamples simulate_ramp(const RampProtocol& protocol, const std::function<double(double)>& rate);
RampSamples simulate_ramp(const RampProtocol& protocol, const JunctionParams& junction,
                          const std::optional<LightModelParams>& light);

/// Pulsed illumination with a short bias window per pulse.
struct PulseProtocol {
  double pulse_power = 0.0;     // W
  double pulse_duration = 0.0;  // s
  double rep_rate = 1.0;        // Hz
  double bias_on_lead = 500e-6; // s, bias on before the pulse
  double bias_off_lag = 200e-6; // s, bias off after the pulse starts
  double bias_current = 0.0;    // A
  std::size_t pulses = 1;
  std::uint64_t seed = 0;

  double bias_window() const { return bias_on_lead + bias_off_lag; }
  double pulse_energy() const { return pulse_power * pulse_duration; }
};

void validate(const PulseProtocol& protocol);

struct PulseResult {
  std::vector<std::uint8_t> switched;
  std::vector<std::uint32_t> photons;
  std::size_t switches = 0;
  double probability = 0.0;
  double error = 0.0;  // sqrt(switches) / pulses
  double mean_photons = 0.0;
  double conversion_probability = 0.0;
  double dark_window_probability = 0.0;
  std::uint64_t seed = 0;
  Metadata metadata;
};

/// Pulse i uses sub-stream i: photon number ~ Poisson(mean_photons), each
/// photon latches with `conversion_probability`, plus a dark escape during
/// the bias window.
PulseResult simulate_pulse(const PulseProtocol& protocol, double mean_photons,
                           double conversion_probability, double dark_rate);

/// Mean photon number from the pulse energy and the absorbed-photon
/// coupling (photons absorbed per joule of laser energy).
PulseResult simulate_pulse(const PulseProtocol& protocol, const JunctionParams& junction,
                           const LightModelParams& light, double absorbed_photons_per_joule);

/// Analytic per-pulse switching probability, 1 - exp(-N p) (1 - p_dark).
double pulse_switch_probability(double mean_photons, double conversion_probability,
                                double dark_window_probability);

ColumnTable to_table(const PulseResult& result);

/// Counts per bin over [0, ceil(duration / width) * width).
std::vector<std::int64_t> bin_counts(const EventTrace& trace, double bin_width);

/// How long to dwell at each bias point when sampling a rate curve.
struct RateSamplingPlan {
  double target_events = 2000.0;  // per point
  double min_dwell = 1.0;         // s
  double max_dwell = 1e4;         // s
};

/// Poisson counts at each bias point (sub-stream = point index). Output
/// channels: rate_Hz, counts, dwell_s, sigma_ln (1/sqrt(counts)).
RateCurve sample_rate_curve(std::span<const double> bias, std::span<const double> model_rate,
                            const RateSamplingPlan& plan, std::uint64_t seed);

/// Bias interval on which a monotone rate model lies within [rate_lo, rate_hi],
/// found by bisection inside [lo, hi].
std::pair<double, double> bias_window(const std::function<double(double)>& rate, double lo,
                                      double hi, double rate_lo, double rate_hi);

std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace jjspd
