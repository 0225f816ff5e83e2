#include "jjspd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "jjspd/error.hpp"

namespace jjspd {

namespace {

constexpr double big = std::numeric_limits<double>::max();

struct Logistic {
  std::span<const Bounds> bounds;

  double to_box(std::size_t i, double u) const {
    const auto& b = bounds[i];
    const double x = b.lower + (b.upper - b.lower) / (1.0 + std::exp(-u));
    return std::clamp(x, std::nextafter(b.lower, b.upper), std::nextafter(b.upper, b.lower));
  }

  double from_box(std::size_t i, double x) const {
    const auto& b = bounds[i];
    double f = (x - b.lower) / (b.upper - b.lower);
    f = std::clamp(f, 1e-9, 1.0 - 1e-9);
    return std::log(f / (1.0 - f));
  }

  std::vector<double> to_box(const std::vector<double>& u) const {
    std::vector<double> x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      x[i] = to_box(i, u[i]);
    }
    return x;
  }
};

struct Vertex {
  std::vector<double> u;
  double value;
};

}  // namespace

OptimizeResult minimize_bounded(const Objective& f, std::vector<double> x0, std::span<const Bounds> bounds,
                                const OptimizeOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0 || bounds.size() != n) {
    throw DomainError("optimizer: need one bound per parameter");
  }
  for (const auto& b : bounds) {
    if (!(b.upper > b.lower)) {
      throw DomainError("optimizer: empty parameter box");
    }
  }
  const Logistic map{bounds};
  OptimizeResult result;

  auto evaluate = [&](const std::vector<double>& u) {
    ++result.evaluations;
    const double v = f(map.to_box(u));
    return std::isfinite(v) ? v : big;
  };

  std::vector<double> best_u(n);
  for (std::size_t i = 0; i < n; ++i) {
    best_u[i] = map.from_box(i, x0[i]);
  }
  double best = evaluate(best_u);
  bool converged = false;

  for (int round = 0; round <= options.restarts; ++round) {
    const double start_value = best;
    std::vector<Vertex> simplex;
    simplex.push_back({best_u, best});
    for (std::size_t i = 0; i < n; ++i) {
      auto u = best_u;
      u[i] += options.initial_step;
      simplex.push_back({u, evaluate(u)});
    }

    converged = false;
    while (result.evaluations < options.max_evaluations) {
      std::sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
      ++result.iterations;
      result.history.push_back(std::min(simplex.front().value, best));

      const double lo = simplex.front().value;
      const double hi = simplex.back().value;
      double size = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          size = std::max(size, std::abs(simplex[k].u[i] - simplex[0].u[i]));
        }
      }
      if (std::abs(hi - lo) <= options.relative_tolerance * (std::abs(lo) + 1e-300) || size < 1e-12) {
        converged = true;
        break;
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          centroid[i] += simplex[k].u[i] / static_cast<double>(n);
        }
      }
      auto along = [&](double t) {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) {
          u[i] = centroid[i] + t * (simplex.back().u[i] - centroid[i]);
        }
        return u;
      };

      auto reflected = along(-1.0);
      const double fr = evaluate(reflected);
      if (fr < simplex.front().value) {
        auto expanded = along(-2.0);
        const double fe = evaluate(expanded);
        simplex.back() = fe < fr ? Vertex{std::move(expanded), fe} : Vertex{std::move(reflected), fr};
        continue;
      }
      if (fr < simplex[n - 1].value) {
        simplex.back() = {std::move(reflected), fr};
        continue;
      }
      const bool outside = fr < simplex.back().value;
      auto contracted = along(outside ? -0.5 : 0.5);
      const double fc = evaluate(contracted);
      if (fc < std::min(fr, simplex.back().value)) {
        simplex.back() = {std::move(contracted), fc};
        continue;
      }
      for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          simplex[k].u[i] = simplex[0].u[i] + 0.5 * (simplex[k].u[i] - simplex[0].u[i]);
        }
        simplex[k].value = evaluate(simplex[k].u);
      }
    }

    const auto it = std::min_element(simplex.begin(), simplex.end(),
                                     [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
    if (it->value < best) {
      best = it->value;
      best_u = it->u;
    }
    if (!converged || result.evaluations >= options.max_evaluations) {
      break;
    }
    if (start_value - best <= options.relative_tolerance * (std::abs(best) + 1e-300) && round > 0) {
      break;
    }
  }

  result.x = map.to_box(best_u);
  result.value = best;
  result.converged = converged && best < big;
  return result;
}

std::vector<std::vector<double>> numeric_hessian(const Objective& f, std::span<const double> x,
                                                 std::span<const Bounds> bounds, double relative_step) {
  const std::size_t n = x.size();
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double width = bounds[i].upper - bounds[i].lower;
    double step = relative_step * std::max(std::abs(x[i]), 1e-3 * width);
    // Keep x +- 2h inside the box where possible.
    const double room = std::min(x[i] - bounds[i].lower, bounds[i].upper - x[i]) / 2.0;
    if (room > 0.0) {
      step = std::min(step, room);
    }
    h[i] = step;
  }
  std::vector<double> p(x.begin(), x.end());
  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    p.assign(x.begin(), x.end());
    p[i] += di;
    p[j] += dj;
    return f(p);
  };
  const double f0 = f(x);
  std::vector<std::vector<double>> hess(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    hess[i][i] = (at(i, h[i], i, 0.0) - 2.0 * f0 + at(i, -h[i], i, 0.0)) / (h[i] * h[i]);
    for (std::size_t j = 0; j < i; ++j) {
      const double v = (at(i, h[i], j, h[j]) - at(i, h[i], j, -h[j]) - at(i, -h[i], j, h[j]) +
                        at(i, -h[i], j, -h[j])) /
                       (4.0 * h[i] * h[j]);
      hess[i][j] = v;
      hess[j][i] = v;
    }
  }
  return hess;
}

Curvature chi_square_curvature(const std::vector<std::vector<double>>& hessian) {
  const auto n = static_cast<Eigen::Index>(hessian.size());
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      h(i, j) = hessian[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  Curvature c;
  c.covariance.assign(hessian.size(), std::vector<double>(hessian.size(), std::numeric_limits<double>::quiet_NaN()));
  const Eigen::VectorXd d = h.diagonal();
  if (!h.allFinite() || (d.array() <= 0.0).any()) {
    c.condition = std::numeric_limits<double>::infinity();
    return c;
  }
  const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd scaled = s.asDiagonal() * h * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
  const auto ev = eig.eigenvalues();
  c.condition = ev.minCoeff() > 0.0 ? ev.maxCoeff() / ev.minCoeff() : std::numeric_limits<double>::infinity();
  if (ev.minCoeff() <= 0.0) {
    return c;
  }
  c.positive_definite = true;
  const Eigen::MatrixXd cov = 2.0 * (s.asDiagonal() * scaled.inverse() * s.asDiagonal());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      c.covariance[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cov(i, j);
    }
  }
  return c;
}

}  // namespace jjspd
