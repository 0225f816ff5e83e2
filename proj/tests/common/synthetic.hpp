#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jjspd/escape.hpp"
#include "jjspd/fit.hpp"
#include "jjspd/simulate.hpp"

namespace jjspd::test {

struct Sweep {
  double rate_min = 1e-2;  // Hz, lower end of the sampled window
  double rate_max = 3e3;
  std::size_t points = 40;
  RateSamplingPlan plan{};
};

inline double model_rate(const JunctionParams& j, const std::optional<LightModelParams>& light, double ib) {
  if (ib >= j.critical_current) return std::numeric_limits<double>::infinity();
  return light ? rate_light_measured(j, ib, *light).total : rate_dark(j, ib / j.critical_current, j.base_temperature);
}

/// Counting data over the bias window where the model lies in [rate_min, rate_max].
inline RateDataset synthetic_rates(const JunctionParams& j, const std::optional<LightModelParams>& light,
                                   std::uint64_t seed, const Sweep& sweep = {}, std::string label = "") {
  auto model = [&](double ib) { return model_rate(j, light, ib); };
  const auto [lo, hi] =
      bias_window(model, 0.5 * j.critical_current, 0.99999 * j.critical_current, sweep.rate_min, sweep.rate_max);
  const auto bias = linspace(lo, hi, sweep.points);
  std::vector<double> rate(bias.size());
  for (std::size_t i = 0; i < bias.size(); ++i) rate[i] = model(bias[i]);
  auto curve = sample_rate_curve(bias, rate, sweep.plan, seed);
  curve.metadata.set("label", label.empty() ? std::string(light ? "light" : "dark") : label);
  curve.metadata.set("photon_rate_Hz", light ? light->photon_rate : 0.0);
  return dataset_from_curve(curve);
}

/// Total switching events in a dataset, from rate and sigma_ln = 1/sqrt(n).
inline double event_count(const RateDataset& d) {
  double n = 0.0;
  for (double s : d.sigma_ln) n += 1.0 / (s * s);
  return n;
}

}  // namespace jjspd::test
