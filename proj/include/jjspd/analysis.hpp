#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jjspd/escape.hpp"
#include "jjspd/simulate.hpp"

namespace jjspd {

/// Poisson description of binned counts.
struct CountHistogram {
  std::vector<std::int64_t> counts;
  double bin_width = 0.0;
  double duration = 0.0;
  double mean = 0.0;      // mu_m, also the Poisson MLE
  double variance = 0.0;  // sigma^2_m, unbiased sample variance
  std::vector<std::int64_t> observed;  // bins with k counts, k = 0..max
  std::vector<double> predicted;       // Poisson(mean) probability of k
};

CountHistogram poisson_fit(std::span<const std::int64_t> counts, double bin_width = 1.0);

enum class Dispersion { poissonian, sub_poissonian, super_poissonian };

struct DispersionTest {
  double ratio = 0.0;  // sigma^2 / mu
  double lower = 0.0;  // acceptance band of the ratio under Poisson counts
  double upper = 0.0;
  double statistic = 0.0;  // (n - 1) s^2 / mu ~ chi^2_{n-1}
  std::size_t bins = 0;
  Dispersion verdict = Dispersion::poissonian;
};

/// Index-of-dispersion test at the given two-sided level. Needs >= 30 bins.
DispersionTest variance_mean_test(std::span<const std::int64_t> counts, double confidence = 0.99);

/// Lag-k sample autocorrelation of a count series.
double autocorrelation(std::span<const std::int64_t> counts, std::size_t lag = 1);

struct LinearityFit {
  double slope = 0.0;
  double offset = 0.0;
  double slope_error = 0.0;
  double offset_error = 0.0;
  double chi_square = 0.0;
  double reduced_chi_square = 0.0;
  std::size_t dof = 0;
  bool offset_constrained = false;  // offset pinned at 0
};

/// Weighted least squares p = slope * N + offset, residuals scaled by
/// 1/sigma. The offset is constrained to be non-negative.
LinearityFit linearity_fit(std::span<const double> mean_photons, std::span<const double> probability,
                           std::span<const double> sigma);

struct WindowProbability {
  double probability = 0.0;
  double sigma = 0.0;  // sqrt(k) / n
  std::size_t windows = 0;
  std::size_t hits = 0;
};

/// Fraction of consecutive windows of the trace containing at least one event.
WindowProbability window_switch_probability(const EventTrace& trace, double window);

/// Binned switching-current distribution.
struct BinnedDistribution {
  std::vector<double> edges;  // size = counts.size() + 1, uniform
  std::vector<double> counts;
};

BinnedDistribution histogram(std::span<const double> samples, std::size_t bins);

/// Fulton-Dunkleberger inversion:
///   Gamma(I_k) = (dI/dt / dI) ln(sum_{j>=k} n_j / sum_{j>=k+1} n_j),
/// evaluated at bin centres. Bins with an empty upper tail are dropped.
/// Channels: rate_Hz, counts (bin occupancy), tail (survivors), sigma_ln.
RateCurve fd_transform(const BinnedDistribution& distribution, double ramp_rate);
RateCurve fd_transform(std::span<const double> samples, double ramp_rate, std::size_t bins = 200);

struct ShapeStats {
  double mean = 0.0;
  double std_dev = 0.0;   // n - 1 denominator
  double skewness = 0.0;  // bias-corrected G1
  std::size_t samples = 0;
};

/// Needs >= 100 samples.
ShapeStats distribution_shape_stats(std::span<const double> samples);

/// Kolmogorov-Smirnov distance between samples and a tabulated CDF.
double ks_distance(std::span<const double> samples, std::span<const double> grid,
                   std::span<const double> cdf);

}  // namespace jjspd
