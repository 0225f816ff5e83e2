#pragma once

#include <functional>
#include <span>
#include <vector>

namespace jjspd {

/// Open box (lower, upper) for one parameter.
struct Bounds {
  double lower;
  double upper;
};

struct OptimizeOptions {
  double relative_tolerance = 1e-8;  // on the objective spread across the simplex
  int max_evaluations = 20000;
  int restarts = 3;
  double initial_step = 0.5;  // simplex edge in logistic coordinates
};

struct OptimizeResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
  std::vector<double> history;  // best objective after each iteration
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead on logistic coordinates so every trial point is strictly
/// inside the box. Restarts from the incumbent until a restart no longer
/// improves the objective.
OptimizeResult minimize_bounded(const Objective& f, std::vector<double> x0, std::span<const Bounds> bounds,
                                const OptimizeOptions& options = {});

/// Central-difference Hessian of f at x; steps are shortened to stay inside bounds.
std::vector<std::vector<double>> numeric_hessian(const Objective& f, std::span<const double> x,
                                                 std::span<const Bounds> bounds, double relative_step = 1e-4);

struct Curvature {
  std::vector<std::vector<double>> covariance;
  bool positive_definite = false;
  double condition = 0.0;  // of the scaled Hessian (correlation form)
};

/// Covariance 2 H^-1 for a chi-square objective.
Curvature chi_square_curvature(const std::vector<std::vector<double>>& hessian);

}  // namespace jjspd
