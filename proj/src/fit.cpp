#include "jjspd/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "jjspd/constants.hpp"
#include "jjspd/error.hpp"

namespace jjspd {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::vector<double> numbers(std::initializer_list<double> v) { return v; }

// One dataset with the junction it is evaluated against.
struct Term {
  JunctionParams junction;
  const RateDataset* data;
};

void check_dataset(const RateDataset& d) {
  const auto n = d.bias_current.size();
  if (d.rate.size() != n || d.sigma_ln.size() != n) {
    throw DataError(fmt::format("dataset '{}': column lengths differ", d.label));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(d.rate[i] > 0.0) || !std::isfinite(d.rate[i])) {
      throw DataError(fmt::format("dataset '{}': rate at point {} must be positive and finite", d.label, i));
    }
    if (!(d.sigma_ln[i] > 0.0) || !std::isfinite(d.sigma_ln[i])) {
      throw DataError(fmt::format("dataset '{}': sigma_ln at point {} must be positive and finite", d.label, i));
    }
  }
}

std::vector<Term> prepare(std::span<const RateDataset> data, const JunctionParams& junction) {
  std::vector<Term> terms;
  for (const auto& d : data) {
    check_dataset(d);
    const auto j = d.critical_current ? with_critical_current(junction, *d.critical_current) : junction;
    for (double ib : d.bias_current) {
      if (!(ib >= 0.0 && ib < j.critical_current)) {
        throw DataError(fmt::format("dataset '{}': bias {} A outside [0, I_c = {} A)", d.label, ib,
                                    j.critical_current));
      }
    }
    terms.push_back({j, &d});
  }
  return terms;
}

std::size_t count_points(const std::vector<Term>& terms) {
  std::size_t n = 0;
  for (const auto& t : terms) {
    n += t.data->bias_current.size();
  }
  return n;
}

double squared(double x) { return x * x; }

double light_chi(const std::vector<Term>& terms, double temperature, double window,
                 std::optional<double> retrap, std::vector<double>* residuals = nullptr) {
  double chi = 0.0;
  for (const auto& t : terms) {
    LightModelParams light{temperature, window, t.data->photon_rate, std::nullopt};
    if (retrap && *retrap < t.junction.critical_current) {
      light.retrap_current = retrap;
    }
    const auto& d = *t.data;
    for (std::size_t i = 0; i < d.bias_current.size(); ++i) {
      const double model = log_rate_light_measured(t.junction, d.bias_current[i], light);
      const double r = (model - std::log(d.rate[i])) / d.sigma_ln[i];
      if (residuals) {
        residuals->push_back(r);
      }
      chi += r * r;
    }
  }
  return std::isfinite(chi) ? chi : inf;
}

bool near_bound(double v, double lo, double hi) {
  const double tol = 1e-4 * (hi - lo);
  return v - lo < tol || hi - v < tol;
}

void finish(FitResult& r, const Objective& chi, std::vector<FitParameter> params, const OptimizeResult& opt,
            std::size_t points, const FitOptions& options) {
  r.parameters = std::move(params);
  std::vector<Bounds> bounds;
  std::vector<double> x;
  for (std::size_t i = 0; i < r.parameters.size(); ++i) {
    auto& p = r.parameters[i];
    p.value = opt.x[i];
    p.at_bound = near_bound(p.value, p.lower, p.upper);
    bounds.push_back({p.lower, p.upper});
    x.push_back(p.value);
  }
  r.chi_square = opt.value;
  r.points = points;
  r.dof = points > r.parameters.size() ? points - r.parameters.size() : 0;
  r.reduced_chi_square = r.dof > 0 ? r.chi_square / static_cast<double>(r.dof) : nan;
  r.converged = opt.converged && std::isfinite(opt.value);
  r.iterations = opt.iterations;
  r.evaluations = opt.evaluations;
  r.history = opt.history;

  const auto curvature = chi_square_curvature(numeric_hessian(chi, x, bounds));
  r.condition = curvature.condition;
  for (std::size_t i = 0; i < r.parameters.size(); ++i) {
    const double v = curvature.covariance[i][i];
    r.parameters[i].uncertainty = v >= 0.0 ? std::sqrt(v) : nan;
  }
  if (!r.converged) {
    r.flags.emplace_back("not_converged");
  }
  if (!curvature.positive_definite || curvature.condition > options.degeneracy_condition) {
    r.flags.emplace_back("degenerate");
  }
  for (const auto& p : r.parameters) {
    if (p.at_bound) {
      r.flags.push_back(p.name + "_at_bound");
    }
    if (!(p.uncertainty < std::abs(p.value))) {
      r.flags.push_back(p.name + "_unconstrained");
    }
  }
}

// Starting point for (T*, dt_1) from the light excess over the dark model:
// ln(excess / R) - ln(A_TA) = ln dt_1 - dU / (k_B T*), a straight line in dU.
std::optional<std::pair<double, double>> excess_estimate(const std::vector<Term>& terms) {
  double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (const auto& t : terms) {
    const auto& d = *t.data;
    if (!(d.photon_rate > 0.0)) {
      continue;
    }
    for (std::size_t i = 0; i < d.bias_current.size(); ++i) {
      const double gamma = d.bias_current[i] / t.junction.critical_current;
      const double dark = std::exp(log_rate_dark(t.junction, gamma, t.junction.base_temperature));
      const double excess = d.rate[i] - dark;
      if (!(excess > 2.0 * d.sigma_ln[i] * d.rate[i])) {
        continue;
      }
      const auto bp = bias_point(t.junction, d.bias_current[i]);
      const double q = bp.quality_factor;
      const double prefactor =
          bp.plasma_frequency / (2.0 * constants::pi) * (std::sqrt(1.0 + 1.0 / (4.0 * q * q)) - 1.0 / (2.0 * q));
      const double y = std::log(excess / d.photon_rate) - std::log(prefactor);
      const double x = bp.barrier;
      const double w = 1.0 / squared(d.sigma_ln[i] * d.rate[i] / excess);
      s += w;
      sx += w * x;
      sy += w * y;
      sxx += w * x * x;
      sxy += w * x * y;
      ++used;
    }
  }
  const double det = s * sxx - sx * sx;
  if (used < 2 || !(det > 0.0)) {
    return std::nullopt;
  }
  const double slope = (s * sxy - sx * sy) / det;
  const double intercept = (sxx * sy - sx * sxy) / det;
  if (!(slope < 0.0)) {
    return std::nullopt;
  }
  return std::make_pair(-1.0 / (constants::boltzmann * slope), std::exp(intercept));
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = lo * std::pow(hi / lo, (static_cast<double>(k) + 0.5) / static_cast<double>(n));
  }
  return g;
}

double base_temperature(const std::vector<Term>& terms) {
  double t0 = 0.0;
  for (const auto& t : terms) {
    t0 = std::max(t0, t.junction.base_temperature);
  }
  return t0;
}

FitResult light_core(const std::vector<Term>& terms, const FitOptions& options, std::string kind) {
  if (terms.empty()) {
    throw DataError("light fit needs at least one dataset");
  }
  const bool any_light = std::any_of(terms.begin(), terms.end(), [](const Term& t) { return t.data->photon_rate > 0.0; });
  if (!any_light) {
    throw DataError("light fit needs at least one dataset with a positive photon rate");
  }
  const std::size_t points = count_points(terms);
  if (points < 3) {
    throw StatisticsError("light fit needs at least 3 points");
  }
  const double t0 = base_temperature(terms);
  const Bounds tb{t0, options.max_escape_temperature};
  const Bounds wb{0.0, options.max_window};

  // Coarse grid, then the excess-line estimate if it scores better.
  double best = inf;
  std::pair<double, double> start{std::sqrt(tb.lower * tb.upper), 1e-9};
  for (double temp : log_grid(std::max(tb.lower, 1e-3), tb.upper, 24)) {
    for (double win : log_grid(1e-14, wb.upper, 40)) {
      const double c = light_chi(terms, temp, win, std::nullopt);
      if (c < best) {
        best = c;
        start = {temp, win};
      }
    }
  }
  if (auto est = excess_estimate(terms)) {
    const double temp = std::clamp(est->first, tb.lower + 1e-6 * (tb.upper - tb.lower), tb.upper);
    const double win = std::clamp(est->second, 1e-15, wb.upper);
    if (light_chi(terms, temp, win, std::nullopt) < best) {
      start = {temp, win};
    }
  }

  const std::vector<Bounds> bounds{tb, wb};
  const Objective chi = [&](std::span<const double> p) { return light_chi(terms, p[0], p[1], std::nullopt); };
  const auto opt = minimize_bounded(chi, {start.first, start.second}, bounds, options.optimizer);

  FitResult r;
  r.kind = std::move(kind);
  finish(r, chi, {{"escape_temperature", "K", 0, tb.lower, tb.upper, 0, false},
                  {"window", "s", 0, wb.lower, wb.upper, 0, false}},
         opt, points, options);
  light_chi(terms, r.value("escape_temperature"), r.value("window"), std::nullopt, &r.residuals);
  return r;
}

}  // namespace

RateDataset dataset_from_curve(const RateCurve& curve, std::string_view rate_channel) {
  if (!curve.has_channel(rate_channel)) {
    throw DataError(fmt::format("rate curve has no '{}' column", rate_channel));
  }
  const auto& rate = curve.channel(rate_channel);
  std::vector<double> sigma;
  if (curve.has_channel("sigma_ln")) {
    sigma = curve.channel("sigma_ln");
  } else if (curve.has_channel("counts")) {
    for (double c : curve.channel("counts")) {
      sigma.push_back(c > 0.0 ? 1.0 / std::sqrt(c) : inf);
    }
  } else {
    sigma.assign(rate.size(), 1.0);
  }
  RateDataset d;
  d.label = curve.metadata.get("label").value_or("");
  d.photon_rate = curve.metadata.get_number("photon_rate_Hz").value_or(0.0);
  d.power = curve.metadata.get_number("power_W").value_or(0.0);
  d.critical_current = curve.metadata.get_number("critical_current_A");
  for (std::size_t i = 0; i < rate.size(); ++i) {
    if (rate[i] > 0.0 && std::isfinite(rate[i]) && sigma[i] > 0.0 && std::isfinite(sigma[i])) {
      d.bias_current.push_back(curve.bias_current[i]);
      d.rate.push_back(rate[i]);
      d.sigma_ln.push_back(sigma[i]);
    } else {
      ++d.dropped_points;
    }
  }
  return d;
}

const FitParameter& FitResult::parameter(std::string_view name) const {
  for (const auto& p : parameters) {
    if (p.name == name) {
      return p;
    }
  }
  throw DataError(fmt::format("fit result has no parameter '{}'", name));
}

bool FitResult::flagged(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

std::optional<double> FitResult::diagnostic(std::string_view name) const {
  for (const auto& [k, v] : diagnostics) {
    if (k == name) {
      return v;
    }
  }
  return std::nullopt;
}

DarkFit fit_dark(const RateDataset& data, const JunctionParams& junction, const FitOptions& options) {
  check_dataset(data);
  const auto n = data.bias_current.size();
  if (n < 5) {
    throw StatisticsError(fmt::format("dark fit needs >= 5 points, got {}", n));
  }
  const auto [rmin, rmax] = std::minmax_element(data.rate.begin(), data.rate.end());
  if (*rmax < 100.0 * *rmin) {
    throw StatisticsError("dark fit needs rates spanning at least two decades");
  }
  const double top = *std::max_element(data.bias_current.begin(), data.bias_current.end());
  const Bounds b{top, 2.0 * top};

  auto chi_at = [&](double ic, std::vector<double>* residuals = nullptr) {
    const auto j = with_critical_current(junction, ic);
    double chi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double model = log_rate_dark(j, data.bias_current[i] / ic, j.base_temperature);
      const double r = (model - std::log(data.rate[i])) / data.sigma_ln[i];
      if (residuals) {
        residuals->push_back(r);
      }
      chi += r * r;
    }
    return std::isfinite(chi) ? chi : inf;
  };

  double start = b.upper;
  double best = inf;
  constexpr int scan = 400;
  for (int k = 1; k <= scan; ++k) {
    const double ic = b.lower + (b.upper - b.lower) * k / scan;
    const double c = chi_at(ic);
    if (c < best) {
      best = c;
      start = ic;
    }
  }
  if (start >= b.upper) {
    start = b.lower + (b.upper - b.lower) * (scan - 0.5) / scan;
  }
  const std::vector<Bounds> bounds{b};
  const Objective chi = [&](std::span<const double> p) { return chi_at(p[0]); };
  auto opt_options = options.optimizer;
  opt_options.initial_step = 0.05;
  const auto opt = minimize_bounded(chi, {start}, bounds, opt_options);

  DarkFit out;
  out.fit.kind = "dark";
  finish(out.fit, chi, {{"critical_current", "A", 0, b.lower, b.upper, 0, false}}, opt, n, options);
  chi_at(out.fit.value("critical_current"), &out.fit.residuals);
  out.junction = with_critical_current(junction, out.fit.value("critical_current"));
  if (data.dropped_points > 0) {
    out.fit.diagnostics.emplace_back("dropped_points", static_cast<double>(data.dropped_points));
  }
  return out;
}

FitResult fit_light(std::span<const RateDataset> data, const JunctionParams& junction, const FitOptions& options) {
  return light_core(prepare(data, junction), options, "light");
}

FitResult fit_light_retrap(std::span<const RateDataset> data, const JunctionParams& junction,
                           const FitOptions& options) {
  const auto terms = prepare(data, junction);
  const auto base = light_core(terms, options, "light");

  double ic_min = inf;
  double bias_min = inf;
  for (const auto& t : terms) {
    ic_min = std::min(ic_min, t.junction.critical_current);
    for (double ib : t.data->bias_current) {
      bias_min = std::min(bias_min, ib);
    }
  }
  const std::size_t points = count_points(terms);
  const std::vector<Bounds> bounds{{base_temperature(terms), options.max_escape_temperature},
                                   {0.0, options.max_window},
                                   {0.0, ic_min}};
  const Objective chi = [&](std::span<const double> p) { return light_chi(terms, p[0], p[1], p[2]); };

  // Multi-start over I_r0 below the lowest measured bias; the two-parameter
  // fit supplies (T*, dt_1).
  std::optional<OptimizeResult> best;
  for (double f : numbers({0.3, 0.5, 0.7, 0.8, 0.85, 0.9, 0.95, 0.99})) {
    const double ir0 = std::min(f * bias_min, 0.999 * ic_min);
    auto opt = minimize_bounded(chi, {base.value("escape_temperature"), base.value("window"), ir0}, bounds,
                                options.optimizer);
    if (!best || opt.value < best->value) {
      best = std::move(opt);
    }
  }

  FitResult r;
  r.kind = "light_retrap";
  finish(r, chi, {{"escape_temperature", "K", 0, bounds[0].lower, bounds[0].upper, 0, false},
                  {"window", "s", 0, bounds[1].lower, bounds[1].upper, 0, false},
                  {"retrap_current", "A", 0, bounds[2].lower, bounds[2].upper, 0, false}},
         *best, points, options);
  const double ir0 = r.value("retrap_current");
  light_chi(terms, r.value("escape_temperature"), r.value("window"), ir0, &r.residuals);

  // Fraction of light-bearing points where the retrapping clamp is active.
  std::size_t clamped = 0;
  std::size_t lit = 0;
  for (const auto& t : terms) {
    if (!(t.data->photon_rate > 0.0)) {
      continue;
    }
    LightModelParams light{r.value("escape_temperature"), r.value("window"), t.data->photon_rate, ir0};
    for (double ib : t.data->bias_current) {
      ++lit;
      clamped += retrap_factor(t.junction, ib, light).clamped ? 1 : 0;
    }
  }
  r.diagnostics.emplace_back("clamped_fraction", lit ? static_cast<double>(clamped) / static_cast<double>(lit) : 0.0);
  if (options.mean_retrap_current) {
    r.diagnostics.emplace_back("mean_retrap_ratio", *options.mean_retrap_current / ir0);
  }
  return r;
}

FitResult fit_gate_joint(std::span<const GateData> gates, const FitOptions& options) {
  if (gates.empty()) {
    throw DataError("gate fit needs at least one gate voltage");
  }
  std::vector<Term> terms;
  std::vector<std::size_t> owner;
  for (std::size_t g = 0; g < gates.size(); ++g) {
    auto part = prepare(gates[g].curves, gates[g].junction);
    for (auto& t : part) {
      terms.push_back(std::move(t));
      owner.push_back(g);
    }
  }
  auto r = light_core(terms, options, gates.size() == 1 ? "light" : "gate_joint");

  // Per-gate mean offset of ln(model / data); a shared model leaves each
  // gate centred within its counting error.
  std::size_t offset = 0;
  const double scale = std::sqrt(std::max(1.0, r.reduced_chi_square));
  for (std::size_t g = 0; g < gates.size(); ++g) {
    double sw = 0.0;
    double swr = 0.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (owner[k] != g) {
        continue;
      }
      const auto& d = *terms[k].data;
      for (std::size_t i = 0; i < d.bias_current.size(); ++i) {
        const double w = 1.0 / squared(d.sigma_ln[i]);
        swr += w * r.residuals[offset + i] * d.sigma_ln[i];
        sw += w;
      }
      offset += d.bias_current.size();
    }
    const double mean = swr / sw;
    const double se = scale / std::sqrt(sw);
    const std::string name = gates[g].label.empty() ? fmt::format("gate{}", g) : gates[g].label;
    r.diagnostics.emplace_back("ln_offset_" + name, mean);
    if (std::abs(mean) > std::max(3.0 * se, 0.1)) {
      if (!r.flagged("inconsistent_gate_normalization")) {
        r.flags.emplace_back("inconsistent_gate_normalization");
      }
    }
  }
  return r;
}

double light_chi_square(std::span<const RateDataset> data, const JunctionParams& junction,
                        const LightModelParams& light) {
  return light_chi(prepare(data, junction), light.escape_temperature, light.window, light.retrap_current);
}

HeatingCorrection heating_correction(std::span<const RateDataset> data, const JunctionParams& junction,
                                     const LightModelParams& light, double reference_power) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return data[a].power < data[b].power; });

  constexpr double lowest = 0.95;
  HeatingCorrection h;
  for (std::size_t k : order) {
    const auto& d = data[k];
    check_dataset(d);
    const double ic = d.critical_current.value_or(junction.critical_current);
    auto chi_at = [&](double f) {
      const auto j = with_critical_current(junction, ic * f);
      double chi = 0.0;
      LightModelParams l = light;
      l.photon_rate = d.photon_rate;
      for (std::size_t i = 0; i < d.bias_current.size(); ++i) {
        if (!(d.bias_current[i] < j.critical_current)) {
          return inf;
        }
        chi += squared((log_rate_light_measured(j, d.bias_current[i], l) - std::log(d.rate[i])) / d.sigma_ln[i]);
      }
      return std::isfinite(chi) ? chi : inf;
    };
    double raw = 1.0;
    double sigma = nan;
    double factor = 1.0;
    if (d.power > reference_power) {
      const auto [f, c] = boost::math::tools::brent_find_minima(chi_at, lowest, 1.0, 52);
      raw = f;
      const double step = 1e-5;
      const double lo = std::max(lowest, f - step);
      const double hi = std::min(1.0, f + step);
      const double mid = 0.5 * (lo + hi);
      const double curv = (chi_at(hi) - 2.0 * chi_at(mid) + chi_at(lo)) / squared(0.5 * (hi - lo));
      sigma = curv > 0.0 ? std::sqrt(2.0 / curv) : nan;
      if (chi_at(1.0) - c >= 4.0) {
        factor = f;
      }
      if (f - lowest < 1e-6) {
        h.flags.push_back(fmt::format("factor_at_bound_{}", d.label.empty() ? std::to_string(k) : d.label));
      }
    }
    if (!h.factor.empty()) {
      factor = std::min(factor, h.factor.back());
    }
    h.power.push_back(d.power);
    h.raw_factor.push_back(raw);
    h.factor.push_back(factor);
    h.uncertainty.push_back(sigma);
  }
  h.out_of_model = std::any_of(h.factor.begin(), h.factor.end(), [](double f) { return f < 0.99; });
  if (h.out_of_model) {
    h.flags.emplace_back("out_of_model");
  }
  return h;
}

}  // namespace jjspd
