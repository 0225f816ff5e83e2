#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jjspd/escape.hpp"
#include "jjspd/junction.hpp"
#include "jjspd/optimize.hpp"

namespace jjspd {

/// Measured rate vs bias at one illumination condition.
struct RateDataset {
  std::string label;
  std::vector<double> bias_current;  // A
  std::vector<double> rate;          // Hz, > 0
  std::vector<double> sigma_ln;      // uncertainty of ln(rate)
  double photon_rate = 0.0;          // Hz; 0 for dark data
  double power = 0.0;                // W, informational
  std::optional<double> critical_current;  // A, overrides the junction's I_c
  std::size_t dropped_points = 0;    // zero-count points removed on import
};

/// Reads rate_Hz plus sigma_ln (or counts) from a curve. Metadata keys
/// label, photon_rate_Hz, power_W and critical_current_A are honoured.
/// Points with zero rate or non-finite sigma are dropped.
RateDataset dataset_from_curve(const RateCurve& curve, std::string_view rate_channel = "rate_Hz");

struct FitParameter {
  std::string name;
  std::string unit;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double uncertainty = 0.0;  // NaN when the curvature is not positive definite
  bool at_bound = false;
};

struct FitResult {
  std::string kind;
  std::vector<FitParameter> parameters;
  double chi_square = 0.0;  // sum of squared ln-rate residuals / sigma
  double reduced_chi_square = 0.0;
  std::size_t points = 0;
  std::size_t dof = 0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
  double condition = 0.0;
  std::vector<double> history;
  std::vector<double> residuals;  // normalised, datasets concatenated
  std::vector<std::string> flags;
  std::vector<std::pair<std::string, double>> diagnostics;

  const FitParameter& parameter(std::string_view name) const;
  double value(std::string_view name) const { return parameter(name).value; }
  bool flagged(std::string_view flag) const;
  std::optional<double> diagnostic(std::string_view name) const;
};

struct FitOptions {
  OptimizeOptions optimizer;
  double max_escape_temperature = 20.0;  // K
  double max_window = 100e-9;            // s
  std::optional<double> mean_retrap_current;  // A, measured <I_r> for the I_r0 diagnostic
  double degeneracy_condition = 1e10;
};

struct DarkFit {
  FitResult fit;
  JunctionParams junction;  // with the fitted I_c and recomputed E_J0, omega_p0, Q0
};

/// I_c from dark rates. `junction` supplies R_n, C, gap and T0; its I_c is ignored.
/// Needs >= 5 points spanning >= 2 decades of rate.
DarkFit fit_dark(const RateDataset& data, const JunctionParams& junction, const FitOptions& options = {});

/// Shared (T*_esc, dt_1) over one or more illuminated datasets.
FitResult fit_light(std::span<const RateDataset> data, const JunctionParams& junction,
                    const FitOptions& options = {});

/// (T*_esc, dt_1, I_r0) with the retrapping term.
FitResult fit_light_retrap(std::span<const RateDataset> data, const JunctionParams& junction,
                           const FitOptions& options = {});

/// Rate curves at one gate voltage. The junction carries that gate's I_c.
struct GateData {
  std::string label;
  JunctionParams junction;
  std::vector<RateDataset> curves;
};

/// Shared (T*_esc, dt_1) over gate voltages with per-gate I_c held fixed.
FitResult fit_gate_joint(std::span<const GateData> gates, const FitOptions& options = {});

struct HeatingCorrection {
  std::vector<double> power;     // W, ascending
  std::vector<double> factor;    // I_c multiplier, monotone non-increasing
  std::vector<double> raw_factor;
  std::vector<double> uncertainty;
  std::vector<std::string> flags;
  bool out_of_model = false;     // some factor below 0.99
};

/// Per-power I_c scale factors in [0.95, 1] that reconcile higher-power data
/// with a low-power light fit. Powers at or below `reference_power` keep 1,
/// as does any power where the scaled model does not improve chi-square by
/// at least 4.
HeatingCorrection heating_correction(std::span<const RateDataset> data, const JunctionParams& junction,
                                     const LightModelParams& light, double reference_power);

/// Weighted sum of squared ln-rate residuals of the light model.
double light_chi_square(std::span<const RateDataset> data, const JunctionParams& junction,
                        const LightModelParams& light);

}  // namespace jjspd
