#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "jjspd/analysis.hpp"
#include "jjspd/error.hpp"
#include "jjspd/fit.hpp"
#include "jjspd/optimize.hpp"
#include "jjspd/random.hpp"
#include "support.hpp"
#include "synthetic.hpp"

using namespace jjspd;

namespace {

const LightModelParams paper_light{2.1, 0.86e-9, 53.0, std::nullopt};

RateDataset with_lognormal_noise(RateDataset d, double sigma, std::uint64_t seed) {
  auto engine = make_stream(seed, 0);
  std::normal_distribution<double> n(0.0, sigma);
  for (std::size_t i = 0; i < d.rate.size(); ++i) {
    d.rate[i] *= std::exp(n(engine));
    d.sigma_ln[i] = std::hypot(d.sigma_ln[i], sigma);
  }
  return d;
}

}  // namespace

TEST_SUITE("optimize") {

TEST_CASE("bounded simplex on the Rosenbrock valley") {
  const Objective rosen = [](std::span<const double> x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  const std::vector<Bounds> box = {{-2, 2}, {-1, 3}};
  const auto r = minimize_bounded(rosen, {-1.2, 1.0}, box);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-3));
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
}

TEST_CASE("minimum outside the box ends at the bound") {
  const Objective f = [](std::span<const double> x) { return (x[0] - 5) * (x[0] - 5); };
  const std::vector<Bounds> box = {{0, 1}};
  const auto r = minimize_bounded(f, {0.5}, box);
  CHECK(r.x[0] > 0.999);
  CHECK(r.x[0] < 1.0);
}

TEST_CASE("curvature of a quadratic chi-square") {
  // chi2 = x^T A x with A = [[2, 1], [1, 3]]; covariance is 2 H^-1 = A^-1.
  const Objective f = [](std::span<const double> x) {
    return 2 * x[0] * x[0] + 2 * x[0] * x[1] + 3 * x[1] * x[1];
  };
  const std::vector<Bounds> box = {{-10, 10}, {-10, 10}};
  const std::vector<double> at = {0.3, -0.2};
  const auto h = numeric_hessian(f, at, box);
  CHECK(h[0][0] == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(h[0][1] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(h[1][1] == doctest::Approx(6.0).epsilon(1e-6));
  const auto c = chi_square_curvature(h);
  CHECK(c.positive_definite);
  CHECK(c.covariance[0][0] == doctest::Approx(0.6).epsilon(1e-6));
  CHECK(c.covariance[0][1] == doctest::Approx(-0.2).epsilon(1e-6));
  CHECK(c.covariance[1][1] == doctest::Approx(0.4).epsilon(1e-6));

  const auto flat = chi_square_curvature({{1.0, 1.0}, {1.0, 1.0}});
  CHECK_FALSE(flat.positive_definite);
}

}

TEST_SUITE("fit") {

TEST_CASE("dark fit recovers I_c from noisy rates") {
  const auto j = test::device_a();
  const auto clean = test::synthetic_rates(j, std::nullopt, 21);
  const auto data = with_lognormal_noise(clean, 0.05, 22);
  const auto r = fit_dark(data, j);
  CHECK(r.fit.kind == "dark");
  CHECK(r.fit.converged);
  CHECK(test::rel_close(r.fit.value("critical_current"), j.critical_current, 0.005));
  CHECK(r.fit.parameter("critical_current").uncertainty > 0.0);
  CHECK(r.junction.plasma_frequency ==
        doctest::Approx(with_critical_current(j, r.fit.value("critical_current")).plasma_frequency));
  CHECK(r.fit.reduced_chi_square < 2.0);
  for (std::size_t i = 1; i < r.fit.history.size(); ++i) CHECK(r.fit.history[i] <= r.fit.history[i - 1]);
}

TEST_CASE("dark fit barely moves under a uniform rate rescaling") {
  const auto j = test::device_a();
  const auto data = test::synthetic_rates(j, std::nullopt, 23);
  const double base = fit_dark(data, j).fit.value("critical_current");
  for (double c : {0.8, 1.25}) {
    auto scaled = data;
    for (auto& v : scaled.rate) v *= c;
    CHECK(test::rel_close(fit_dark(scaled, j).fit.value("critical_current"), base, 0.01));
  }
}

TEST_CASE("fitted I_c sits about ten percent above the mean switching current") {
  const auto j = test::device_a();
  const double ic = fit_dark(test::synthetic_rates(j, std::nullopt, 24), j).fit.value("critical_current");
  RampProtocol p{1e-6, 9.0e-6, 11.99e-6, 5000, 25, 10001};
  const auto s = distribution_shape_stats(simulate_ramp(p, j, std::nullopt).switched());
  const double ratio = ic / s.mean;
  CHECK(ratio >= 1.05);
  CHECK(ratio <= 1.15);
}

TEST_CASE("dark fit needs enough dynamic range") {
  const auto j = test::device_a();
  test::Sweep narrow;
  narrow.rate_min = 10;
  narrow.rate_max = 50;
  CHECK_THROWS_AS(fit_dark(test::synthetic_rates(j, std::nullopt, 26, narrow), j), StatisticsError);
  auto few = test::synthetic_rates(j, std::nullopt, 27);
  few.bias_current.resize(4);
  few.rate.resize(4);
  few.sigma_ln.resize(4);
  CHECK_THROWS_AS(fit_dark(few, j), StatisticsError);
}

TEST_CASE("light fit recovers the escape temperature and window") {
  const auto j = test::device_a();
  auto l2 = paper_light;
  l2.photon_rate = 106;
  const std::vector<RateDataset> data = {test::synthetic_rates(j, paper_light, 31),
                                         test::synthetic_rates(j, l2, 32)};
  const auto r = fit_light(data, j);
  CHECK(r.kind == "light");
  CHECK(test::rel_close(r.value("escape_temperature"), 2.1, 0.05));
  CHECK(test::rel_close(r.value("window"), 0.86e-9, 0.10));
  CHECK(r.reduced_chi_square < 2.0);
  CHECK_FALSE(r.flagged("degenerate"));
  CHECK(light_chi_square(data, j, {r.value("escape_temperature"), r.value("window"), 0.0, std::nullopt}) ==
        doctest::Approx(r.chi_square).epsilon(1e-9));
}

TEST_CASE("a single gate reduces to the plain light fit") {
  const auto j = test::device_a();
  const std::vector<RateDataset> data = {test::synthetic_rates(j, paper_light, 33)};
  const auto plain = fit_light(data, j);
  const std::vector<GateData> gate = {{"g", j, data}};
  const auto joint = fit_gate_joint(gate);
  CHECK(joint.kind == "light");
  CHECK(joint.value("escape_temperature") == doctest::Approx(plain.value("escape_temperature")).epsilon(1e-9));
  CHECK(joint.value("window") == doctest::Approx(plain.value("window")).epsilon(1e-9));
}

TEST_CASE("a mis-normalized gate is flagged") {
  std::vector<GateData> gates;
  for (int g = 0; g < 3; ++g) {
    const auto j = with_critical_current(test::device_a(), (11.0 + 0.4 * g) * 1e-6);
    gates.push_back({"g" + std::to_string(g), j, {test::synthetic_rates(j, paper_light, 40 + g)}});
  }
  const auto ok = fit_gate_joint(gates);
  CHECK(ok.kind == "gate_joint");
  CHECK_FALSE(ok.flagged("inconsistent_gate_normalization"));
  for (auto& v : gates[1].curves[0].rate) v *= 3.0;
  CHECK(fit_gate_joint(gates).flagged("inconsistent_gate_normalization"));
}

TEST_CASE("heating correction recovers a suppressed I_c") {
  const auto j = test::device_a();
  std::vector<RateDataset> data;
  const double powers[] = {100e-12, 200e-12, 800e-12};
  const double factors[] = {1.0, 1.0, 0.996};
  for (int k = 0; k < 3; ++k) {
    auto light = paper_light;
    light.photon_rate = 53.0 * powers[k] / 100e-12;
    auto d = test::synthetic_rates(with_critical_current(j, factors[k] * j.critical_current), light, 50 + k);
    d.power = powers[k];
    d.label = std::to_string(k);
    data.push_back(std::move(d));
  }
  const auto h = heating_correction(data, j, paper_light, 100e-12);
  REQUIRE(h.factor.size() == 3);
  CHECK(h.factor[0] == 1.0);
  CHECK(h.factor[1] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(h.factor[2] == doctest::Approx(0.996).epsilon(1e-3));
  CHECK(h.factor[2] <= h.factor[1]);
  CHECK_FALSE(h.out_of_model);
}

TEST_CASE("retrapping parameters are recovered where the rollover is visible") {
  // I_r0 low enough that the suppression edge falls inside the sampled window.
  const auto j = test::device_a();
  const LightModelParams truth{2.1, 0.86e-9, 212.0, 7.2e-6};
  test::Sweep sweep;
  sweep.rate_min = 3e-3;
  sweep.points = 60;
  const std::vector<RateDataset> data = {test::synthetic_rates(j, truth, 61, sweep)};
  CHECK(retrap_factor(j, data[0].bias_current.front(), truth).product > 0.5);
  CHECK(retrap_factor(j, data[0].bias_current.back(), truth).product < 0.2);
  FitOptions options;
  options.mean_retrap_current = 7.0e-6;
  const auto r = fit_light_retrap(data, j, options);
  CHECK(r.kind == "light_retrap");
  CHECK(test::rel_close(r.value("escape_temperature"), 2.1, 0.10));
  CHECK(test::rel_close(r.value("window"), 0.86e-9, 0.10));
  CHECK(test::rel_close(r.value("retrap_current"), 7.2e-6, 0.02));
  REQUIRE(r.diagnostic("mean_retrap_ratio"));
  CHECK(*r.diagnostic("mean_retrap_ratio") == doctest::Approx(7.0e-6 / r.value("retrap_current")).epsilon(1e-9));
}

TEST_CASE("dataset import drops empty points") {
  RateCurve c;
  c.bias_current = {1e-6, 2e-6, 3e-6};
  c.add_channel("rate_Hz") = {0.0, 2.0, 5.0};
  c.add_channel("counts") = {0.0, 4.0, 25.0};
  c.metadata.set("photon_rate_Hz", 53.0);
  c.metadata.set("label", std::string("x"));
  const auto d = dataset_from_curve(c);
  CHECK(d.bias_current.size() == 2);
  CHECK(d.dropped_points == 1);
  CHECK(d.photon_rate == 53.0);
  CHECK(d.label == "x");
  CHECK(d.sigma_ln[1] == doctest::Approx(0.2));
}

}
