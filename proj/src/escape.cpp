#include "jjspd/escape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "jjspd/constants.hpp"
#include "jjspd/error.hpp"
#include "jjspd/parallel.hpp"

namespace jjspd {

using namespace constants;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
const double log_floor = std::log(rate_floor);

double flush(double log_rate) { return log_rate < log_floor ? 0.0 : std::exp(log_rate); }

double log_sum_exp(double a, double b) {
  if (a == -inf) {
    return b;
  }
  if (b == -inf) {
    return a;
  }
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0)) {
    throw DomainError(fmt::format("normalized bias must be >= 0, got {}", gamma));
  }
}

struct Washboard {
  double plasma_frequency;
  double quality_factor;
  double barrier;
};

Washboard washboard(const JunctionParams& j, double gamma) {
  const double wp = j.plasma_frequency * std::pow(1.0 - gamma * gamma, 0.25);
  return {wp, wp * j.normal_resistance * j.capacitance, barrier_exact(gamma, j.josephson_energy)};
}

double log_ta(const Washboard& w, double temperature) {
  if (temperature == 0.0) {
    return -inf;
  }
  const double q = w.quality_factor;
  const double damping = std::sqrt(1.0 + 1.0 / (4.0 * q * q)) - 1.0 / (2.0 * q);
  return std::log(w.plasma_frequency / (2.0 * pi) * damping) - w.barrier / (boltzmann * temperature);
}

double mqt_temperature(const Washboard& w) {
  return hbar * w.plasma_frequency / (7.2 * boltzmann * (1.0 + 0.87 / w.quality_factor));
}

double log_mqt(const Washboard& w) {
  const double prefactor =
      12.0 * w.plasma_frequency * std::sqrt(3.0 * w.barrier / (2.0 * pi * hbar * w.plasma_frequency));
  return std::log(prefactor) - w.barrier / (boltzmann * mqt_temperature(w));
}

}  // namespace

BiasPoint bias_point(const JunctionParams& junction, double bias_current) {
  const double gamma = bias_current / junction.critical_current;
  check_gamma(gamma);
  if (gamma >= 1.0) {
    throw DomainError(fmt::format("bias {} A is at or above I_c = {} A", bias_current,
                                  junction.critical_current));
  }
  const auto w = washboard(junction, gamma);
  return {bias_current, gamma, w.plasma_frequency, w.quality_factor, w.barrier};
}

double barrier_exact(double gamma, double josephson_energy) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw DomainError(fmt::format("barrier requires gamma in [0, 1], got {}", gamma));
  }
  return 2.0 * josephson_energy * (std::sqrt(1.0 - gamma * gamma) - gamma * std::acos(gamma));
}

double barrier_approx(double gamma, double josephson_energy) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw DomainError(fmt::format("barrier requires gamma in [0, 1], got {}", gamma));
  }
  return 4.0 * std::sqrt(2.0) / 3.0 * josephson_energy * std::pow(1.0 - gamma, 1.5);
}

double mqt_escape_temperature(const JunctionParams& junction, double gamma) {
  check_gamma(gamma);
  if (gamma >= 1.0) {
    return 0.0;
  }
  return mqt_temperature(washboard(junction, gamma));
}

double log_rate_ta(const JunctionParams& junction, double gamma, double temperature) {
  check_gamma(gamma);
  detail::require_non_negative(temperature, "temperature");
  if (gamma >= 1.0) {
    return inf;
  }
  return log_ta(washboard(junction, gamma), temperature);
}

double log_rate_mqt(const JunctionParams& junction, double gamma) {
  check_gamma(gamma);
  if (gamma >= 1.0) {
    return inf;
  }
  return log_mqt(washboard(junction, gamma));
}

double log_rate_dark(const JunctionParams& junction, double gamma, double temperature) {
  check_gamma(gamma);
  detail::require_non_negative(temperature, "temperature");
  if (gamma >= 1.0) {
    return inf;
  }
  const auto w = washboard(junction, gamma);
  return log_sum_exp(log_mqt(w), log_ta(w, temperature));
}

double rate_ta(const JunctionParams& junction, double gamma, double temperature) {
  return flush(log_rate_ta(junction, gamma, temperature));
}

double rate_mqt(const JunctionParams& junction, double gamma) {
  return flush(log_rate_mqt(junction, gamma));
}

double rate_dark(const JunctionParams& junction, double gamma, double temperature) {
  return flush(log_rate_dark(junction, gamma, temperature));
}

double retrap_barrier(const JunctionParams& junction, double bias_current, double retrap_current) {
  const double x = (bias_current - retrap_current) / junction.critical_current;
  const double q = junction.quality_factor;
  return junction.josephson_energy * q * q / 2.0 * x * x;
}

namespace {

double log_retrap_rate(const JunctionParams& j, double bias_current, double retrap_current,
                       double temperature) {
  const double x = (bias_current - retrap_current) / j.critical_current;
  const double kt = boltzmann * temperature;
  return std::log(j.plasma_frequency * x * std::sqrt(j.josephson_energy / (2.0 * pi * kt))) -
         retrap_barrier(j, bias_current, retrap_current) / kt;
}

}  // namespace

double retrap_rate(const JunctionParams& junction, double bias_current, double retrap_current,
                   double temperature) {
  detail::require_positive(temperature, "temperature");
  if (!(bias_current > retrap_current)) {
    throw DomainError(fmt::format("retrapping rate needs I_b > I_r0 (I_b = {} A, I_r0 = {} A)",
                                  bias_current, retrap_current));
  }
  return flush(log_retrap_rate(junction, bias_current, retrap_current, temperature));
}

double escape_probability(double rate, double duration) {
  detail::require_non_negative(rate, "rate");
  detail::require_non_negative(duration, "duration");
  if (rate == inf) {
    return duration > 0.0 ? 1.0 : 0.0;
  }
  return -std::expm1(-rate * duration);
}

void validate(const LightModelParams& light, const JunctionParams& junction) {
  if (!(light.escape_temperature > 0.0)) {
    throw ConfigError("light model: escape temperature must be positive");
  }
  if (!(light.window > 0.0)) {
    throw ConfigError("light model: window dt_1 must be positive");
  }
  if (!(light.photon_rate >= 0.0)) {
    throw ConfigError("light model: photon rate must be non-negative");
  }
  if (light.retrap_current &&
      !(*light.retrap_current > 0.0 && *light.retrap_current < junction.critical_current)) {
    throw ConfigError("light model: retrapping current must lie in (0, I_c)");
  }
}

double rate_light_escape(const JunctionParams& junction, double gamma, double escape_temperature) {
  return rate_dark(junction, gamma, escape_temperature);
}

RetrapFactor retrap_factor(const JunctionParams& junction, double bias_current,
                           const LightModelParams& light) {
  if (!light.retrap_current) {
    return {0.0, 1.0, false};
  }
  // At or below I_r0 the running state cannot latch.
  if (bias_current <= *light.retrap_current) {
    return {inf, 0.0, true};
  }
  const double product =
      std::exp(log_retrap_rate(junction, bias_current, *light.retrap_current, light.escape_temperature)) *
      light.window;
  if (product >= 1.0) {
    return {product, 0.0, true};
  }
  return {product, 1.0 - product, false};
}

namespace {

struct LightTerms {
  double log_dark;
  double log_light;
  RetrapFactor retrap;
};

LightTerms light_terms(const JunctionParams& j, double bias_current, const LightModelParams& light) {
  const double gamma = bias_current / j.critical_current;
  const auto w = washboard(j, gamma);
  const double log_mqt_rate = log_mqt(w);
  const double log_dark_rate = log_sum_exp(log_mqt_rate, log_ta(w, j.base_temperature));
  const double log_light_esc = log_sum_exp(log_mqt_rate, log_ta(w, light.escape_temperature));
  const auto retrap = retrap_factor(j, bias_current, light);
  const double exposure = light.window * light.photon_rate;

  LightTerms t{};
  t.retrap = retrap;
  t.log_dark = log_dark_rate + std::log1p(-std::min(exposure, 1.0));
  t.log_light = (exposure > 0.0 && retrap.survival > 0.0)
                    ? log_light_esc + std::log(exposure) + std::log(retrap.survival)
                    : -inf;
  return t;
}

}  // namespace

MeasuredRate rate_light_measured(const JunctionParams& junction, double bias_current,
                                 const LightModelParams& light) {
  const double gamma = bias_current / junction.critical_current;
  check_gamma(gamma);
  if (gamma >= 1.0) {
    return {inf, inf, 0.0, 0.0, false};
  }
  const auto t = light_terms(junction, bias_current, light);
  const double dark = flush(t.log_dark);
  const double lit = flush(t.log_light);
  return {dark + lit, dark, lit, t.retrap.product, t.retrap.clamped};
}

double log_rate_light_measured(const JunctionParams& junction, double bias_current,
                               const LightModelParams& light) {
  const double gamma = bias_current / junction.critical_current;
  check_gamma(gamma);
  if (gamma >= 1.0) {
    return inf;
  }
  const auto t = light_terms(junction, bias_current, light);
  return log_sum_exp(t.log_dark, t.log_light);
}

double photon_switch_probability(const JunctionParams& junction, double bias_current,
                                 const LightModelParams& light) {
  const double gamma = bias_current / junction.critical_current;
  check_gamma(gamma);
  if (gamma >= 1.0) {
    return 1.0;
  }
  const double esc = escape_probability(rate_light_escape(junction, gamma, light.escape_temperature),
                                        light.window);
  return esc * retrap_factor(junction, bias_current, light).survival;
}

bool RateCurve::has_channel(std::string_view name) const {
  return std::any_of(channels.begin(), channels.end(), [&](const auto& c) { return c.first == name; });
}

const std::vector<double>& RateCurve::channel(std::string_view name) const {
  for (const auto& [n, values] : channels) {
    if (n == name) {
      return values;
    }
  }
  throw DataError(fmt::format("rate curve has no channel '{}'", name));
}

std::vector<double>& RateCurve::add_channel(std::string name) {
  channels.emplace_back(std::move(name), std::vector<double>(bias_current.size(), 0.0));
  return channels.back().second;
}

namespace {

RateCurve curve_skeleton(const JunctionParams& junction, std::span<const double> bias) {
  RateCurve curve;
  curve.bias_current.assign(bias.begin(), bias.end());
  curve.gamma.resize(bias.size());
  for (std::size_t i = 0; i < bias.size(); ++i) {
    curve.gamma[i] = bias[i] / junction.critical_current;
  }
  curve.metadata.set("critical_current_A", junction.critical_current);
  curve.metadata.set("normal_resistance_ohm", junction.normal_resistance);
  curve.metadata.set("capacitance_F", junction.capacitance);
  return curve;
}

}  // namespace

RateCurve dark_rate_curve(const JunctionParams& junction, std::span<const double> bias,
                          double temperature) {
  auto curve = curve_skeleton(junction, bias);
  curve.metadata.set("kind", std::string("dark"));
  curve.metadata.set("temperature_K", temperature);
  auto& ta = curve.add_channel("rate_TA_Hz");
  auto& mqt = curve.add_channel("rate_MQT_Hz");
  auto& total = curve.add_channel("rate_total_Hz");
  parallel_for(bias.size(), [&](std::size_t i) {
    const double g = curve.gamma[i];
    ta[i] = rate_ta(junction, g, temperature);
    mqt[i] = rate_mqt(junction, g);
    total[i] = rate_dark(junction, g, temperature);
  });
  return curve;
}

RateCurve light_rate_curve(const JunctionParams& junction, std::span<const double> bias,
                           const LightModelParams& light) {
  validate(light, junction);
  auto curve = curve_skeleton(junction, bias);
  curve.metadata.set("kind", std::string("light"));
  curve.metadata.set("temperature_K", junction.base_temperature);
  curve.metadata.set("escape_temperature_K", light.escape_temperature);
  curve.metadata.set("window_s", light.window);
  curve.metadata.set("photon_rate_Hz", light.photon_rate);
  if (light.retrap_current) {
    curve.metadata.set("retrap_current_A", *light.retrap_current);
  }
  auto& ta = curve.add_channel("rate_TA_Hz");
  auto& mqt = curve.add_channel("rate_MQT_Hz");
  auto& dark = curve.add_channel("rate_dark_Hz");
  auto& lit = curve.add_channel("rate_light_term_Hz");
  auto& total = curve.add_channel("rate_total_Hz");
  auto& product = curve.add_channel("retrap_product");
  auto& clamped = curve.add_channel("retrap_clamped");
  std::vector<char> any_clamped(bias.size(), 0);
  parallel_for(bias.size(), [&](std::size_t i) {
    const double g = curve.gamma[i];
    ta[i] = rate_ta(junction, g, light.escape_temperature);
    mqt[i] = rate_mqt(junction, g);
    const auto m = rate_light_measured(junction, bias[i], light);
    dark[i] = m.dark_term;
    lit[i] = m.light_term;
    total[i] = m.total;
    product[i] = m.retrap_product;
    clamped[i] = m.retrap_clamped ? 1.0 : 0.0;
    any_clamped[i] = m.retrap_clamped;
  });
  curve.metadata.set("retrap_clamp_active",
                     std::string(std::any_of(any_clamped.begin(), any_clamped.end(),
                                             [](char c) { return c != 0; })
                                     ? "true"
                                     : "false"));
  return curve;
}

ColumnTable to_table(const RateCurve& curve) {
  std::vector<std::string> columns{"I_b_A"};
  const bool with_gamma = !curve.gamma.empty();
  if (with_gamma) {
    columns.emplace_back("gamma");
  }
  for (const auto& [name, values] : curve.channels) {
    columns.push_back(name);
  }
  ColumnTable table(std::move(columns));
  table.metadata() = curve.metadata;
  std::vector<double> row;
  for (std::size_t i = 0; i < curve.bias_current.size(); ++i) {
    row.clear();
    row.push_back(curve.bias_current[i]);
    if (with_gamma) {
      row.push_back(curve.gamma[i]);
    }
    for (const auto& [name, values] : curve.channels) {
      row.push_back(values[i]);
    }
    table.add_row(row);
  }
  return table;
}

RateCurve rate_curve_from_table(const ColumnTable& table) {
  RateCurve curve;
  curve.metadata = table.metadata();
  curve.bias_current = table.numeric_column("I_b_A");
  if (table.has_column("gamma")) {
    curve.gamma = table.numeric_column("gamma");
  }
  for (const auto& name : table.columns()) {
    if (name == "I_b_A" || name == "gamma") {
      continue;
    }
    curve.channels.emplace_back(name, table.numeric_column(name));
  }
  return curve;
}

}  // namespace jjspd
