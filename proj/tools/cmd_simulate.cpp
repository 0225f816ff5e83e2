#include <cmath>
#include <iostream>

#include <fmt/format.h>

#include "commands.hpp"
#include "common.hpp"
#include "jjspd/constants.hpp"
#include "jjspd/error.hpp"
#include "jjspd/simulate.hpp"

namespace jjspd::cli {

namespace {

void run_cw(const Settings& s) {
  const auto j = selected_junction(s);
  auto light = selected_light(s);
  CWProtocol p;
  p.bias_current = s.get_number("bias_uA") * units::uA;
  p.duration = s.get_number("duration_s");
  p.dead_time = s.get_number("dead_time_ms") * units::ms;
  p.photon_rate = light ? light->photon_rate : 0.0;
  p.seed = s.get_integer("seed");
  const auto trace = simulate_cw(p, j, light);
  std::cout << fmt::format("{} switches in {} s ({:.3f} Hz)\n", trace.events.size(), p.duration,
                           static_cast<double>(trace.events.size()) / p.duration);
  write_table(s, "trace.csv", to_table(trace), p.seed);
}

void run_ramp(const Settings& s) {
  const auto j = selected_junction(s);
  const auto light = selected_light(s);
  RampProtocol p;
  p.ramp_rate = s.get_number("ramp_rate_uA_per_s") * units::uA;
  p.start = s.maybe_number("start_uA").value_or(0.8 * j.critical_current / units::uA) * units::uA;
  p.stop = s.maybe_number("stop_uA").value_or(j.critical_current / units::uA) * units::uA;
  p.trials = s.get_integer("trials");
  p.grid_points = s.get_integer("grid_points");
  p.seed = s.get_integer("seed");
  const auto samples = simulate_ramp(p, j, light);
  const auto switched = samples.switched();
  ColumnTable table({"I_s_A"});
  table.metadata() = samples.metadata;
  table.metadata().set("ramp_rate_A_per_s", p.ramp_rate);
  table.metadata().set("no_switch", static_cast<std::int64_t>(samples.no_switch_count()));
  for (double v : switched) {
    table.add_row(std::vector<std::string>{format_number(v)});
  }
  std::cout << fmt::format("{} of {} trials switched\n", switched.size(), p.trials);
  write_table(s, "ramp.csv", std::move(table), p.seed);
}

void run_pulse(const Settings& s) {
  const auto j = selected_junction(s);
  auto light = selected_light(s);
  if (!light) {
    throw ConfigError("simulate pulse: escape_temperature_K and window_ns are required");
  }
  PulseProtocol p;
  p.pulse_power = s.get_number("pulse_power_pW") * units::pW;
  p.pulse_duration = s.get_number("pulse_duration_ns") * units::ns;
  p.rep_rate = s.get_number("rep_rate_Hz");
  p.bias_current = s.get_number("bias_uA") * units::uA;
  p.pulses = s.get_integer("pulses");
  p.seed = s.get_integer("seed");
  const double per_joule = s.get_number("photons_per_fJ") / units::fJ;
  const auto result = simulate_pulse(p, j, *light, per_joule);
  std::cout << fmt::format("<N> = {:.4f}, p_switch = {:.5f} +- {:.5f}\n", result.mean_photons, result.probability,
                           result.error);
  write_table(s, "pulse.csv", to_table(result), p.seed);
}

void run_sample_rates(const Settings& s) {
  const auto j = selected_junction(s);
  const auto light = selected_light(s);
  auto model = [&](double ib) {
    if (ib >= j.critical_current) {
      return std::numeric_limits<double>::infinity();
    }
    return light ? rate_light_measured(j, ib, *light).total : rate_dark(j, ib / j.critical_current, j.base_temperature);
  };
  double lo = 0.0;
  double hi = 0.0;
  if (s.has("from_uA") && s.has("to_uA")) {
    lo = s.get_number("from_uA") * units::uA;
    hi = s.get_number("to_uA") * units::uA;
  } else {
    std::tie(lo, hi) = bias_window(model, 0.5 * j.critical_current, 0.99999 * j.critical_current,
                                   s.get_number("rate_min_Hz"), s.get_number("rate_max_Hz"));
  }
  const auto bias = linspace(lo, hi, s.get_integer("points"));
  std::vector<double> rate(bias.size());
  for (std::size_t i = 0; i < bias.size(); ++i) {
    rate[i] = model(bias[i]);
  }
  RateSamplingPlan plan;
  plan.target_events = s.get_number("target_events");
  plan.min_dwell = s.get_number("min_dwell_s");
  plan.max_dwell = s.get_number("max_dwell_s");
  const auto seed = s.get_integer("seed");
  auto curve = sample_rate_curve(bias, rate, plan, seed);
  curve.gamma.clear();
  auto& m = curve.metadata;
  m.set("label", s.maybe_text("label").value_or(light ? "light" : "dark"));
  m.set("photon_rate_Hz", light ? light->photon_rate : 0.0);
  m.set("power_W", s.get_number("power_pW") * units::pW);
  m.set("model_critical_current_A", j.critical_current);
  if (light) {
    m.set("model_escape_temperature_K", light->escape_temperature);
    m.set("model_window_s", light->window);
    if (light->retrap_current) {
      m.set("model_retrap_current_A", *light->retrap_current);
    }
  }
  std::cout << fmt::format("{} points over [{:.4f}, {:.4f}] uA\n", bias.size(), lo / units::uA, hi / units::uA);
  write_table(s, "rates_sampled.csv", to_table(curve), seed);
}

Settings& leaf(CLI::App& parent, Store& store, const char* name, const char* help, const std::string& command) {
  auto* sub = parent.add_subcommand(name, help);
  auto& s = *store.emplace_back(std::make_unique<Settings>(*sub, command));
  device_options(s);
  light_options(s);
  s.integer("seed", 1, "Master seed");
  return s;
}

}  // namespace

void add_simulate_commands(CLI::App& app, Store& store) {
  auto* sim = app.add_subcommand("simulate", "Monte Carlo switching simulations");
  sim->require_subcommand(1);
  {
    auto& s = leaf(*sim, store, "cw", "Continuous illumination at fixed bias -> event trace", "simulate cw");
    s.number("bias_uA", std::nullopt, "Bias current [uA]");
    s.number("duration_s", std::nullopt, "Duration [s]");
    s.number("dead_time_ms", 1.0, "Latch reset time [ms]");
    sim->get_subcommand("cw")->callback([&s] {
      s.resolve();
      run_cw(s);
    });
  }
  {
    auto& s = leaf(*sim, store, "ramp", "Bias ramps -> switching currents", "simulate ramp");
    s.number("ramp_rate_uA_per_s", 1.0, "Ramp rate [uA/s]");
    s.number("start_uA", std::nullopt, "Ramp start [uA] (default 0.8 I_c)");
    s.number("stop_uA", std::nullopt, "Ramp stop [uA] (default I_c)");
    s.integer("trials", 10000, "Number of ramps");
    s.integer("grid_points", 10001, "Hazard grid points (>= 10001)");
    sim->get_subcommand("ramp")->callback([&s] {
      s.resolve();
      run_ramp(s);
    });
  }
  {
    auto& s = leaf(*sim, store, "pulse", "Pulsed illumination -> per-pulse outcomes", "simulate pulse");
    s.number("pulse_power_pW", std::nullopt, "Pulse peak power [pW]");
    s.number("pulse_duration_ns", std::nullopt, "Pulse duration [ns]");
    s.number("rep_rate_Hz", 1.0, "Repetition rate [Hz]");
    s.number("bias_uA", std::nullopt, "Bias current during the window [uA]");
    s.integer("pulses", 10000, "Number of pulses");
    s.number("photons_per_fJ", std::nullopt, "Absorbed photons per fJ of pulse energy");
    sim->get_subcommand("pulse")->callback([&s] {
      s.resolve();
      run_pulse(s);
    });
  }
  {
    auto& s = leaf(*sim, store, "rates", "Poisson-sampled rate curve (synthetic dataset)", "simulate rates");
    s.number("from_uA", std::nullopt, "First bias [uA]");
    s.number("to_uA", std::nullopt, "Last bias [uA]");
    s.number("rate_min_Hz", 1e-2, "Lower model rate of the automatic bias window [Hz]");
    s.number("rate_max_Hz", 3e3, "Upper model rate of the automatic bias window [Hz]");
    s.integer("points", 40, "Bias points");
    s.number("target_events", 2000.0, "Target counts per point");
    s.number("min_dwell_s", 1.0, "Minimum dwell per point [s]");
    s.number("max_dwell_s", 1e4, "Maximum dwell per point [s]");
    s.number("power_pW", 0.0, "Laser power recorded with the data [pW]");
    s.text("label", std::nullopt, "Dataset label");
    sim->get_subcommand("rates")->callback([&s] {
      s.resolve();
      run_sample_rates(s);
    });
  }
}

}  // namespace jjspd::cli
