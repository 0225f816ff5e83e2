#include "jjspd/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "jjspd/error.hpp"
#include "jjspd/parallel.hpp"
#include "jjspd/random.hpp"

namespace jjspd {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double exponential(Engine& engine, double rate) {
  if (rate <= 0.0) {
    return inf;
  }
  return -std::log(uniform_open(engine)) / rate;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::dark:
      return "dark";
    case EventKind::photon:
      return "photon";
    case EventKind::pulse:
      return "pulse";
  }
  return "unknown";
}

EventKind event_kind_from_string(std::string_view text) {
  if (text == "dark") {
    return EventKind::dark;
  }
  if (text == "photon") {
    return EventKind::photon;
  }
  if (text == "pulse") {
    return EventKind::pulse;
  }
  throw DataError(fmt::format("unknown event kind '{}'", text));
}

std::vector<double> EventTrace::times() const {
  std::vector<double> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    out.push_back(e.time);
  }
  return out;
}

ColumnTable to_table(const EventTrace& trace) {
  ColumnTable table({"t_seconds", "kind", "pulse_index"});
  table.metadata() = trace.metadata;
  table.metadata().set("seed", trace.seed);
  table.metadata().set("duration_s", trace.duration);
  table.metadata().set("events", static_cast<std::int64_t>(trace.events.size()));
  for (const auto& e : trace.events) {
    table.add_row({format_number(e.time), std::string(to_string(e.kind)),
                   e.pulse_index >= 0 ? std::to_string(e.pulse_index) : std::string()});
  }
  return table;
}

EventTrace event_trace_from_table(const ColumnTable& table) {
  EventTrace trace;
  trace.metadata = table.metadata();
  const auto times = table.numeric_column("t_seconds");
  const auto kinds = table.has_column("kind") ? table.text_column("kind")
                                              : std::vector<std::string>(times.size(), "dark");
  const auto index = table.has_column("pulse_index") ? table.text_column("pulse_index")
                                                     : std::vector<std::string>(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw DataError(fmt::format("event times must be strictly increasing (row {})", i + 1));
    }
    SwitchEvent e{times[i], event_kind_from_string(kinds[i]), -1};
    if (!index[i].empty()) {
      e.pulse_index = std::stoll(index[i]);
    }
    trace.events.push_back(e);
  }
  const auto duration = trace.metadata.get_number("duration_s");
  trace.duration = duration ? *duration : (times.empty() ? 0.0 : times.back());
  if (!times.empty() && times.back() > trace.duration) {
    throw DataError("event after the recorded trace duration");
  }
  if (const auto seed = trace.metadata.get("seed")) {
    trace.seed = std::stoull(*seed);
  }
  return trace;
}

void validate(const CWProtocol& p) {
  if (!(p.duration > 0.0)) {
    throw ConfigError("CW protocol: duration must be positive");
  }
  if (!(p.dead_time >= 0.0)) {
    throw ConfigError("CW protocol: dead time must be non-negative");
  }
  if (!(p.photon_rate >= 0.0)) {
    throw ConfigError("CW protocol: photon rate must be non-negative");
  }
  if (!(p.bias_current >= 0.0)) {
    throw ConfigError("CW protocol: bias current must be non-negative");
  }
}

EventTrace simulate_cw(const CWProtocol& protocol, double dark_rate, double switch_probability) {
  validate(protocol);
  if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate)) {
    throw ConfigError(fmt::format("CW simulation: dark rate must be finite and >= 0, got {}", dark_rate));
  }
  if (!(switch_probability >= 0.0 && switch_probability <= 1.0)) {
    throw ConfigError("CW simulation: switch probability must lie in [0, 1]");
  }
  Engine dark_stream = make_stream(protocol.seed, 0);
  Engine photon_stream = make_stream(protocol.seed, 1);
  Engine conversion_stream = make_stream(protocol.seed, 2);

  EventTrace trace;
  trace.duration = protocol.duration;
  trace.seed = protocol.seed;
  trace.metadata.set("protocol", std::string("cw"));
  trace.metadata.set("bias_current_A", protocol.bias_current);
  trace.metadata.set("dead_time_s", protocol.dead_time);
  trace.metadata.set("photon_rate_Hz", protocol.photon_rate);
  trace.metadata.set("dark_rate_Hz", dark_rate);
  trace.metadata.set("switch_probability", switch_probability);

  const double photon_rate = switch_probability > 0.0 ? protocol.photon_rate : 0.0;
  double next_dark = exponential(dark_stream, dark_rate);
  double next_photon = exponential(photon_stream, photon_rate);
  double blocked_until = -inf;
  while (true) {
    const bool photon = next_photon < next_dark;
    const double t = photon ? next_photon : next_dark;
    if (!(t < protocol.duration)) {
      break;
    }
    bool latched = false;
    if (photon) {
      next_photon += exponential(photon_stream, photon_rate);
      // Every photon consumes one conversion draw so streams stay aligned.
      const bool converted = uniform_open(conversion_stream) < switch_probability;
      latched = converted && t >= blocked_until;
    } else {
      next_dark += exponential(dark_stream, dark_rate);
      latched = t >= blocked_until;
    }
    if (latched) {
      trace.events.push_back({t, photon ? EventKind::photon : EventKind::dark, -1});
      blocked_until = t + protocol.dead_time;
    }
  }
  return trace;
}

EventTrace simulate_cw(const CWProtocol& protocol, const JunctionParams& junction,
                       const std::optional<LightModelParams>& light) {
  const double gamma = protocol.bias_current / junction.critical_current;
  if (!(gamma < 1.0)) {
    throw ConfigError("CW protocol: bias current must stay below I_c");
  }
  const double dark = rate_dark(junction, gamma, junction.base_temperature);
  double p = 0.0;
  if (light) {
    validate(*light, junction);
    p = photon_switch_probability(junction, protocol.bias_current, *light);
  }
  auto trace = simulate_cw(protocol, dark, p);
  trace.metadata.set("critical_current_A", junction.critical_current);
  if (light) {
    trace.metadata.set("escape_temperature_K", light->escape_temperature);
    trace.metadata.set("window_s", light->window);
  }
  return trace;
}

void validate(const RampProtocol& p) {
  if (!(p.ramp_rate > 0.0)) {
    throw ConfigError("ramp protocol: ramp rate must be positive");
  }
  if (!(p.start >= 0.0 && p.start < p.stop)) {
    throw ConfigError("ramp protocol: need 0 <= start < stop");
  }
  if (p.trials < 1) {
    throw ConfigError("ramp protocol: at least one trial");
  }
  if (p.grid_points < 10001) {
    throw ConfigError("ramp protocol: hazard grid needs at least 10001 points");
  }
}

std::vector<double> RampSamples::switched() const {
  std::vector<double> out;
  out.reserve(switching_current.size());
  for (const auto& s : switching_current) {
    if (s) {
      out.push_back(*s);
    }
  }
  return out;
}

std::size_t RampSamples::no_switch_count() const {
  return static_cast<std::size_t>(
      std::count_if(switching_current.begin(), switching_current.end(), [](const auto& s) { return !s; }));
}

SwitchingDensity switching_density_from_rate(std::span<const double> current,
                                             std::span<const double> rate, double ramp_rate) {
  if (current.size() != rate.size() || current.size() < 2) {
    throw DataError("switching density needs matching current and rate grids of >= 2 points");
  }
  detail::require_positive(ramp_rate, "ramp rate");
  SwitchingDensity d;
  d.current.assign(current.begin(), current.end());
  d.cumulative_hazard.resize(current.size());
  d.survival.resize(current.size());
  d.density.resize(current.size());
  double h = 0.0;
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (i > 0) {
      h += 0.5 * (rate[i - 1] + rate[i]) * (current[i] - current[i - 1]) / ramp_rate;
    }
    d.cumulative_hazard[i] = h;
    d.survival[i] = std::exp(-h);
    d.density[i] = std::isinf(rate[i]) ? 0.0 : rate[i] / ramp_rate * d.survival[i];
  }
  return d;
}

RampSamples simulate_ramp(const RampProtocol& protocol, const std::function<double(double)>& rate) {
  validate(protocol);
  const auto grid = linspace(protocol.start, protocol.stop, protocol.grid_points);
  std::vector<double> rates(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { rates[i] = rate(grid[i]); });
  const auto density = switching_density_from_rate(grid, rates, protocol.ramp_rate);
  const auto& h = density.cumulative_hazard;

  RampSamples out;
  out.seed = protocol.seed;
  out.switching_current.resize(protocol.trials);
  parallel_for(protocol.trials, [&](std::size_t trial) {
    Engine engine = make_stream(protocol.seed, trial);
    const double target = -std::log(uniform_open(engine));
    const auto it = std::lower_bound(h.begin(), h.end(), target);
    if (it == h.end()) {
      return;
    }
    const auto k = static_cast<std::size_t>(it - h.begin());
    if (k == 0) {
      out.switching_current[trial] = grid[0];
      return;
    }
    if (std::isinf(h[k])) {
      out.switching_current[trial] = grid[k];
      return;
    }
    const double f = (target - h[k - 1]) / (h[k] - h[k - 1]);
    out.switching_current[trial] = grid[k - 1] + f * (grid[k] - grid[k - 1]);
  });
  out.metadata.set("protocol", std::string("ramp"));
  out.metadata.set("ramp_rate_A_per_s", protocol.ramp_rate);
  out.metadata.set("start_A", protocol.start);
  out.metadata.set("stop_A", protocol.stop);
  out.metadata.set("trials", static_cast<std::int64_t>(protocol.trials));
  out.metadata.set("seed", protocol.seed);
  out.metadata.set("no_switch_trials", static_cast<std::int64_t>(out.no_switch_count()));
  return out;
}

RampSamples simulate_ramp(const RampProtocol& protocol, const JunctionParams& junction,
                          const std::optional<LightModelParams>& light) {
  if (protocol.stop > junction.critical_current) {
    throw ConfigError("ramp protocol: stop current exceeds I_c");
  }
  if (light) {
    validate(*light, junction);
  }
  auto rate = [&](double current) {
    if (light) {
      return rate_light_measured(junction, current, *light).total;
    }
    return rate_dark(junction, current / junction.critical_current, junction.base_temperature);
  };
  auto out = simulate_ramp(protocol, rate);
  out.metadata.set("critical_current_A", junction.critical_current);
  out.metadata.set("temperature_K", junction.base_temperature);
  out.metadata.set("illuminated", std::string(light ? "true" : "false"));
  return out;
}

void validate(const PulseProtocol& p) {
  if (!(p.pulse_power >= 0.0 && p.pulse_duration >= 0.0)) {
    throw ConfigError("pulse protocol: power and duration must be non-negative");
  }
  if (!(p.rep_rate > 0.0)) {
    throw ConfigError("pulse protocol: repetition rate must be positive");
  }
  if (!(p.bias_on_lead >= 0.0 && p.bias_off_lag >= 0.0)) {
    throw ConfigError("pulse protocol: bias timing must be non-negative");
  }
  if (!(1.0 / p.rep_rate > p.bias_window())) {
    throw ConfigError("pulse protocol: repetition period must exceed the bias window");
  }
  if (p.pulses < 1) {
    throw ConfigError("pulse protocol: at least one pulse");
  }
}

double pulse_switch_probability(double mean_photons, double conversion_probability,
                                double dark_window_probability) {
  return 1.0 - std::exp(-mean_photons * conversion_probability) * (1.0 - dark_window_probability);
}

PulseResult simulate_pulse(const PulseProtocol& protocol, double mean_photons,
                           double conversion_probability, double dark_rate) {
  validate(protocol);
  if (!(mean_photons >= 0.0) || !(conversion_probability >= 0.0 && conversion_probability <= 1.0) ||
      !(dark_rate >= 0.0)) {
    throw ConfigError("pulse simulation: invalid photon number, conversion probability or dark rate");
  }
  PulseResult r;
  r.seed = protocol.seed;
  r.mean_photons = mean_photons;
  r.conversion_probability = conversion_probability;
  r.dark_window_probability = escape_probability(dark_rate, protocol.bias_window());
  r.switched.resize(protocol.pulses);
  r.photons.resize(protocol.pulses);
  parallel_for(protocol.pulses, [&](std::size_t i) {
    Engine engine = make_stream(protocol.seed, i);
    std::poisson_distribution<std::uint32_t> photons(mean_photons);
    const std::uint32_t n = mean_photons > 0.0 ? photons(engine) : 0;
    bool hit = false;
    for (std::uint32_t k = 0; k < n; ++k) {
      hit = (uniform_open(engine) < conversion_probability) || hit;
    }
    const bool dark = uniform_open(engine) < r.dark_window_probability;
    r.photons[i] = n;
    r.switched[i] = hit ? 2 : (dark ? 1 : 0);
  });
  r.switches = static_cast<std::size_t>(
      std::count_if(r.switched.begin(), r.switched.end(), [](std::uint8_t s) { return s != 0; }));
  const auto n = static_cast<double>(protocol.pulses);
  r.probability = static_cast<double>(r.switches) / n;
  r.error = std::sqrt(static_cast<double>(r.switches)) / n;
  r.metadata.set("protocol", std::string("pulse"));
  r.metadata.set("pulse_power_W", protocol.pulse_power);
  r.metadata.set("pulse_duration_s", protocol.pulse_duration);
  r.metadata.set("pulse_energy_J", protocol.pulse_energy());
  r.metadata.set("rep_rate_Hz", protocol.rep_rate);
  r.metadata.set("bias_window_s", protocol.bias_window());
  r.metadata.set("bias_current_A", protocol.bias_current);
  r.metadata.set("pulses", static_cast<std::int64_t>(protocol.pulses));
  r.metadata.set("seed", protocol.seed);
  r.metadata.set("mean_photons", mean_photons);
  r.metadata.set("conversion_probability", conversion_probability);
  r.metadata.set("dark_window_probability", r.dark_window_probability);
  r.metadata.set("switch_probability", r.probability);
  r.metadata.set("switch_probability_error", r.error);
  return r;
}

PulseResult simulate_pulse(const PulseProtocol& protocol, const JunctionParams& junction,
                           const LightModelParams& light, double absorbed_photons_per_joule) {
  validate(light, junction);
  const double gamma = protocol.bias_current / junction.critical_current;
  if (!(gamma < 1.0)) {
    throw ConfigError("pulse protocol: bias current must stay below I_c");
  }
  const double n = absorbed_photons_per_joule * protocol.pulse_energy();
  const double p = photon_switch_probability(junction, protocol.bias_current, light);
  const double dark = rate_dark(junction, gamma, junction.base_temperature);
  return simulate_pulse(protocol, n, p, dark);
}

ColumnTable to_table(const PulseResult& result) {
  ColumnTable table({"pulse_index", "photons", "switched", "cause"});
  table.metadata() = result.metadata;
  for (std::size_t i = 0; i < result.switched.size(); ++i) {
    const auto s = result.switched[i];
    table.add_row({std::to_string(i), std::to_string(result.photons[i]), s ? "1" : "0",
                   s == 2 ? "photon" : (s == 1 ? "dark" : "")});
  }
  return table;
}

std::vector<std::int64_t> bin_counts(const EventTrace& trace, double bin_width) {
  detail::require_positive(bin_width, "bin width");
  const auto bins = static_cast<std::size_t>(std::ceil(trace.duration / bin_width - 1e-12));
  std::vector<std::int64_t> counts(std::max<std::size_t>(bins, 1), 0);
  for (const auto& e : trace.events) {
    auto b = static_cast<std::size_t>(e.time / bin_width);
    counts[std::min(b, counts.size() - 1)] += 1;
  }
  return counts;
}

RateCurve sample_rate_curve(std::span<const double> bias, std::span<const double> model_rate,
                            const RateSamplingPlan& plan, std::uint64_t seed) {
  if (bias.size() != model_rate.size()) {
    throw DataError("bias and model rate grids differ in length");
  }
  RateCurve curve;
  curve.bias_current.assign(bias.begin(), bias.end());
  auto& rate = curve.add_channel("rate_Hz");
  auto& counts = curve.add_channel("counts");
  auto& dwell = curve.add_channel("dwell_s");
  auto& sigma = curve.add_channel("sigma_ln");
  for (std::size_t i = 0; i < bias.size(); ++i) {
    const double r = model_rate[i];
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw DataError(fmt::format("model rate at point {} is not finite", i));
    }
    const double t = r > 0.0 ? std::clamp(plan.target_events / r, plan.min_dwell, plan.max_dwell)
                             : plan.max_dwell;
    Engine engine = make_stream(seed, i);
    const double mean = r * t;
    double n = 0.0;
    if (mean > 0.0) {
      // Poisson variates for large means are drawn in floating point.
      std::poisson_distribution<std::int64_t> poisson(mean);
      n = static_cast<double>(poisson(engine));
    }
    dwell[i] = t;
    counts[i] = n;
    rate[i] = n / t;
    sigma[i] = n > 0.0 ? 1.0 / std::sqrt(n) : std::numeric_limits<double>::infinity();
  }
  curve.metadata.set("seed", seed);
  curve.metadata.set("target_events", plan.target_events);
  return curve;
}

std::pair<double, double> bias_window(const std::function<double(double)>& rate, double lo, double hi,
                                      double rate_lo, double rate_hi) {
  auto solve = [&](double level) {
    double a = lo;
    double b = hi;
    if (rate(a) >= level) {
      return a;
    }
    if (rate(b) <= level) {
      return b;
    }
    for (int it = 0; it < 200 && (b - a) > 1e-15 * std::abs(b); ++it) {
      const double m = 0.5 * (a + b);
      (rate(m) < level ? a : b) = m;
    }
    return 0.5 * (a + b);
  };
  return {solve(rate_lo), solve(rate_hi)};
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = b;
  return out;
}

}  // namespace jjspd
