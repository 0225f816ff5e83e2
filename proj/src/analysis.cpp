#include "jjspd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include "jjspd/error.hpp"
#include "jjspd/optics.hpp"

namespace jjspd {

CountHistogram poisson_fit(std::span<const std::int64_t> counts, double bin_width) {
  if (counts.empty()) {
    throw StatisticsError("Poisson fit needs at least one bin");
  }
  CountHistogram h;
  h.counts.assign(counts.begin(), counts.end());
  h.bin_width = bin_width;
  h.duration = bin_width * static_cast<double>(counts.size());
  const auto n = static_cast<double>(counts.size());
  const double sum = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
  h.mean = sum / n;
  double ss = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - h.mean;
    ss += d * d;
  }
  h.variance = counts.size() > 1 ? ss / (n - 1.0) : 0.0;
  const auto k_max = *std::max_element(counts.begin(), counts.end());
  h.observed.assign(static_cast<std::size_t>(k_max) + 1, 0);
  for (auto c : counts) {
    h.observed[static_cast<std::size_t>(c)] += 1;
  }
  h.predicted = poisson_probabilities(h.mean, static_cast<int>(k_max));
  return h;
}

DispersionTest variance_mean_test(std::span<const std::int64_t> counts, double confidence) {
  if (counts.size() < 30) {
    throw StatisticsError(fmt::format("variance/mean test needs >= 30 bins, got {}", counts.size()));
  }
  const auto h = poisson_fit(counts);
  if (!(h.mean > 0.0)) {
    throw StatisticsError("variance/mean test undefined for all-zero counts");
  }
  DispersionTest t;
  t.bins = counts.size();
  t.ratio = h.variance / h.mean;
  const double dof = static_cast<double>(counts.size() - 1);
  t.statistic = dof * t.ratio;
  boost::math::chi_squared chi2(dof);
  const double tail = 0.5 * (1.0 - confidence);
  t.lower = boost::math::quantile(chi2, tail) / dof;
  t.upper = boost::math::quantile(boost::math::complement(chi2, tail)) / dof;
  if (t.ratio < t.lower) {
    t.verdict = Dispersion::sub_poissonian;
  } else if (t.ratio > t.upper) {
    t.verdict = Dispersion::super_poissonian;
  }
  return t;
}

double autocorrelation(std::span<const std::int64_t> counts, std::size_t lag) {
  if (counts.size() <= lag + 1) {
    throw StatisticsError("series too short for the requested lag");
  }
  const auto n = static_cast<double>(counts.size());
  const double mean =
      static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0})) / n;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double d = static_cast<double>(counts[i]) - mean;
    den += d * d;
    if (i + lag < counts.size()) {
      num += d * (static_cast<double>(counts[i + lag]) - mean);
    }
  }
  if (den == 0.0) {
    return 0.0;
  }
  return num / den;
}

LinearityFit linearity_fit(std::span<const double> x, std::span<const double> y,
                           std::span<const double> sigma) {
  if (x.size() != y.size() || x.size() != sigma.size()) {
    throw DataError("linearity fit: input arrays differ in length");
  }
  if (x.size() < 3) {
    throw StatisticsError("linearity fit needs at least 3 points");
  }
  double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(sigma[i] > 0.0)) {
      throw DataError(fmt::format("linearity fit: sigma at point {} must be positive", i));
    }
    const double w = 1.0 / (sigma[i] * sigma[i]);
    s += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  if (!(std::abs(det) > 1e-12 * s * sxx)) {
    throw DomainError("linearity fit: singular design (all x equal)");
  }
  LinearityFit f;
  f.slope = (s * sxy - sx * sy) / det;
  f.offset = (sxx * sy - sx * sxy) / det;
  f.slope_error = std::sqrt(s / det);
  f.offset_error = std::sqrt(sxx / det);
  f.dof = x.size() - 2;
  if (f.offset < 0.0) {
    f.offset_constrained = true;
    f.offset = 0.0;
    f.slope = sxy / sxx;
    f.slope_error = std::sqrt(1.0 / sxx);
    f.offset_error = 0.0;
    f.dof = x.size() - 1;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (y[i] - f.slope * x[i] - f.offset) / sigma[i];
    f.chi_square += r * r;
  }
  f.reduced_chi_square = f.chi_square / static_cast<double>(f.dof);
  return f;
}

WindowProbability window_switch_probability(const EventTrace& trace, double window) {
  detail::require_positive(window, "window");
  WindowProbability p;
  p.windows = static_cast<std::size_t>(std::floor(trace.duration / window + 1e-9));
  if (p.windows == 0) {
    throw StatisticsError("trace shorter than one window");
  }
  std::int64_t last = -1;
  for (const auto& e : trace.events) {
    const auto w = static_cast<std::int64_t>(e.time / window);
    if (w >= static_cast<std::int64_t>(p.windows)) {
      break;
    }
    if (w != last) {
      ++p.hits;
      last = w;
    }
  }
  const auto n = static_cast<double>(p.windows);
  p.probability = static_cast<double>(p.hits) / n;
  p.sigma = std::sqrt(static_cast<double>(p.hits)) / n;
  return p;
}

BinnedDistribution histogram(std::span<const double> samples, std::size_t bins) {
  if (samples.empty() || bins == 0) {
    throw StatisticsError("histogram needs samples and at least one bin");
  }
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) {
    hi = lo + 1e-12 * std::max(1.0, std::abs(lo));
  }
  BinnedDistribution d;
  d.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    d.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  d.counts.assign(bins, 0.0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double s : samples) {
    auto k = static_cast<std::size_t>((s - lo) / width);
    d.counts[std::min(k, bins - 1)] += 1.0;
  }
  return d;
}

RateCurve fd_transform(const BinnedDistribution& d, double ramp_rate) {
  detail::require_positive(ramp_rate, "ramp rate");
  const std::size_t bins = d.counts.size();
  if (d.edges.size() != bins + 1) {
    throw DataError("binned distribution: edges must have one more entry than counts");
  }
  const auto occupied = std::count_if(d.counts.begin(), d.counts.end(), [](double c) { return c > 0.0; });
  if (occupied < 2) {
    throw DataError("Fulton-Dunkleberger transform needs at least two occupied bins");
  }
  std::vector<double> tail(bins + 1, 0.0);
  for (std::size_t k = bins; k-- > 0;) {
    tail[k] = tail[k + 1] + d.counts[k];
  }
  RateCurve curve;
  std::vector<double> rate, counts, survivors, sigma;
  for (std::size_t k = 0; k < bins; ++k) {
    if (!(tail[k + 1] > 0.0) || !(d.counts[k] > 0.0)) {
      continue;
    }
    const double width = d.edges[k + 1] - d.edges[k];
    curve.bias_current.push_back(0.5 * (d.edges[k] + d.edges[k + 1]));
    rate.push_back(ramp_rate / width * std::log(tail[k] / tail[k + 1]));
    counts.push_back(d.counts[k]);
    survivors.push_back(tail[k]);
    // Delta method for ln(ln(S_k / S_{k+1})) with multinomial bin counts.
    const double l = std::log(tail[k] / tail[k + 1]);
    sigma.push_back(std::sqrt(1.0 / tail[k + 1] - 1.0 / tail[k]) / l);
  }
  curve.channels.emplace_back("rate_Hz", std::move(rate));
  curve.channels.emplace_back("counts", std::move(counts));
  curve.channels.emplace_back("tail", std::move(survivors));
  curve.channels.emplace_back("sigma_ln", std::move(sigma));
  curve.metadata.set("kind", std::string("fulton_dunkleberger"));
  curve.metadata.set("ramp_rate_A_per_s", ramp_rate);
  curve.metadata.set("bins", static_cast<std::int64_t>(bins));
  return curve;
}

RateCurve fd_transform(std::span<const double> samples, double ramp_rate, std::size_t bins) {
  return fd_transform(histogram(samples, bins), ramp_rate);
}

ShapeStats distribution_shape_stats(std::span<const double> samples) {
  if (samples.size() < 100) {
    throw StatisticsError(fmt::format("shape statistics need >= 100 samples, got {}", samples.size()));
  }
  ShapeStats s;
  s.samples = samples.size();
  const auto n = static_cast<double>(samples.size());
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double x : samples) {
    const double d = x - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  s.std_dev = std::sqrt(m2 * n / (n - 1.0));
  const double g1 = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  s.skewness = std::sqrt(n * (n - 1.0)) / (n - 2.0) * g1;
  return s;
}

double ks_distance(std::span<const double> samples, std::span<const double> grid,
                   std::span<const double> cdf) {
  if (samples.empty() || grid.size() != cdf.size() || grid.size() < 2) {
    throw DataError("KS distance needs samples and a tabulated CDF");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  auto model = [&](double x) {
    if (x <= grid.front()) {
      return cdf.front();
    }
    if (x >= grid.back()) {
      return cdf.back();
    }
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const auto k = static_cast<std::size_t>(it - grid.begin());
    const double f = (x - grid[k - 1]) / (grid[k] - grid[k - 1]);
    return cdf[k - 1] + f * (cdf[k] - cdf[k - 1]);
  };
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = model(sorted[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
  }
  return d;
}

}  // namespace jjspd
