#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "jjspd/analysis.hpp"
#include "jjspd/error.hpp"
#include "jjspd/parallel.hpp"
#include "jjspd/random.hpp"
#include "jjspd/simulate.hpp"
#include "support.hpp"

using namespace jjspd;

namespace {

struct ThreadLimit {
  unsigned saved = thread_limit();
  explicit ThreadLimit(unsigned n) { set_thread_limit(n); }
  ~ThreadLimit() { set_thread_limit(saved); }
};

}  // namespace

TEST_SUITE("random") {

TEST_CASE("sub-stream seeds") {
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(stream_seed(7, 0) == splitmix64(7 + 0x9E3779B97F4A7C15ULL));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(stream_seed(42, s));
  CHECK(seen.size() == 1000);
  auto a = make_stream(1, 3);
  auto b = make_stream(1, 3);
  CHECK(a() == b());
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform_open(a);
    CHECK((u > 0.0 && u < 1.0));
  }
}

}

TEST_SUITE("simulate") {

TEST_CASE("CW traces are reproducible and respect the dead time") {
  CWProtocol p{10.9e-6, 200.0, 1e-3, 940.0, 17};
  const auto a = simulate_cw(p, 5.0, 0.05);
  const auto b = simulate_cw(p, 5.0, 0.05);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].time == b.events[i].time);
  }
  for (std::size_t i = 1; i < a.events.size(); ++i) {
    CHECK(a.events[i].time - a.events[i - 1].time >= p.dead_time);
  }
  p.seed = 18;
  CHECK(simulate_cw(p, 5.0, 0.05).events.size() != a.events.size());
}

TEST_CASE("CW count rate follows the non-paralyzable dead-time law") {
  const double lambda = 5.0 + 940.0 * 0.05;
  for (double tau : {0.0, 1e-3, 5e-3}) {
    CWProtocol p{10.9e-6, 2000.0, tau, 940.0, 5};
    const auto t = simulate_cw(p, 5.0, 0.05);
    const double expected = lambda / (1 + lambda * tau) * p.duration;
    CHECK(std::abs(static_cast<double>(t.events.size()) - expected) < 4 * std::sqrt(expected));
  }
}

TEST_CASE("CW with the escape model has no photon events in the dark") {
  const auto j = test::device_a();
  CWProtocol p{11.2e-6, 20.0, 1e-3, 0.0, 3};
  const auto t = simulate_cw(p, j, std::nullopt);
  CHECK(!t.events.empty());
  for (const auto& e : t.events) CHECK(e.kind == EventKind::dark);
}

TEST_CASE("event trace table round-trip") {
  CWProtocol p{10.9e-6, 50.0, 1e-3, 940.0, 9};
  const auto a = simulate_cw(p, 5.0, 0.05);
  std::stringstream buf;
  to_table(a).write(buf);
  const auto b = event_trace_from_table(ColumnTable::read(buf));
  REQUIRE(b.events.size() == a.events.size());
  CHECK(b.duration == a.duration);
  CHECK(b.seed == a.seed);
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(b.events[i].time == a.events[i].time);
    CHECK(b.events[i].kind == a.events[i].kind);
  }
  const auto counts = bin_counts(a, 1.0);
  CHECK(counts.size() == 50);
  CHECK(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) ==
        static_cast<std::int64_t>(a.events.size()));
}

TEST_CASE("constant hazard gives an exponential switching distribution") {
  const double gamma0 = 2.0;
  const double ramp = 1e-6;
  const auto grid = linspace(0.0, 5e-6, 2001);
  const std::vector<double> rate(grid.size(), gamma0);
  const auto d = switching_density_from_rate(grid, rate, ramp);
  for (std::size_t i = 0; i < grid.size(); i += 100) {
    CHECK(d.survival[i] == doctest::Approx(std::exp(-gamma0 * grid[i] / ramp)).epsilon(1e-10));
  }
  CHECK(d.switched_fraction() == doctest::Approx(1 - std::exp(-10.0)).epsilon(1e-12));
}

TEST_CASE("ramp samples match the switching density") {
  const auto j = test::device_a();
  RampProtocol p{1e-6, 10.0e-6, 11.99e-6, 20000, 11, 10001};
  const auto s = simulate_ramp(p, j, std::nullopt);
  CHECK(s.no_switch_count() == 0);
  const auto grid = linspace(p.start, p.stop, p.grid_points);
  std::vector<double> rate(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) rate[i] = rate_dark(j, grid[i] / j.critical_current, 0.027);
  const auto d = switching_density_from_rate(grid, rate, p.ramp_rate);
  std::vector<double> cdf(d.survival.size());
  std::transform(d.survival.begin(), d.survival.end(), cdf.begin(), [](double v) { return 1 - v; });
  CHECK(ks_distance(s.switched(), grid, cdf) < 0.02);
}

TEST_CASE("ramp output does not depend on the thread count") {
  const auto j = test::device_a();
  RampProtocol p{1e-6, 10.0e-6, 11.99e-6, 3000, 5, 10001};
  std::vector<double> one, many;
  {
    ThreadLimit limit(1);
    one = simulate_ramp(p, j, std::nullopt).switched();
  }
  {
    ThreadLimit limit(4);
    many = simulate_ramp(p, j, std::nullopt).switched();
  }
  CHECK(one == many);
}

TEST_CASE("a trial's draw depends only on its index") {
  const auto j = test::device_a();
  RampProtocol small{1e-6, 10.0e-6, 11.99e-6, 100, 5, 10001};
  RampProtocol large = small;
  large.trials = 400;
  const auto a = simulate_ramp(small, j, std::nullopt);
  const auto b = simulate_ramp(large, j, std::nullopt);
  for (std::size_t i = 0; i < small.trials; ++i) CHECK(a.switching_current[i] == b.switching_current[i]);
}

TEST_CASE("trials that never switch are reported") {
  RampProtocol p{1e-6, 0.0, 1e-6, 1000, 2, 10001};
  const auto s = simulate_ramp(p, [](double) { return 0.5; });
  const double expected = std::exp(-0.5) * 1000;
  CHECK(std::abs(static_cast<double>(s.no_switch_count()) - expected) < 5 * std::sqrt(expected));
}

TEST_CASE("pulse probability matches the analytic form") {
  PulseProtocol p;
  p.pulse_power = 250e-12;
  p.pulse_duration = 1e-3;
  p.rep_rate = 100;
  p.bias_current = 10.9e-6;
  p.pulses = 100000;
  p.seed = 4;
  const double n = 0.13;
  const double eta = 0.15;
  const auto r = simulate_pulse(p, n, eta, 0.03);
  const double expected = pulse_switch_probability(n, eta, r.dark_window_probability);
  CHECK(std::abs(r.probability - expected) < 4 * std::sqrt(expected * (1 - expected) / p.pulses));
  double mean = 0.0;
  for (auto k : r.photons) mean += k;
  CHECK(mean / p.pulses == doctest::Approx(n).epsilon(0.03));
  CHECK(pulse_switch_probability(0.0, eta, 0.01) == doctest::Approx(0.01));
}

TEST_CASE("sampled rate curve dwell and counts") {
  const std::vector<double> bias = {1, 2, 3};
  const std::vector<double> model = {0.01, 20.0, 1e5};
  const RateSamplingPlan plan{2000, 1.0, 1e4};
  const auto c = sample_rate_curve(bias, model, plan, 8);
  CHECK(c.channel("dwell_s")[0] == 1e4);
  CHECK(c.channel("dwell_s")[1] == 100.0);
  CHECK(c.channel("dwell_s")[2] == 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    const double mean = model[i] * c.channel("dwell_s")[i];
    CHECK(std::abs(c.channel("counts")[i] - mean) < 5 * std::sqrt(mean));
  }
  const auto again = sample_rate_curve(bias, model, plan, 8);
  CHECK(again.channel("counts") == c.channel("counts"));
}

TEST_CASE("bias window brackets the requested rates") {
  const auto j = test::device_a();
  auto rate = [&](double ib) { return rate_dark(j, ib / j.critical_current, 0.027); };
  const auto [lo, hi] = bias_window(rate, 8e-6, 11.98e-6, 1e-2, 3e3);
  CHECK(rate(lo) == doctest::Approx(1e-2).epsilon(1e-6));
  CHECK(rate(hi) == doctest::Approx(3e3).epsilon(1e-6));
  CHECK(lo < hi);
}

TEST_CASE("invalid protocols") {
  CHECK_THROWS(validate(CWProtocol{1e-6, -1.0, 1e-3, 0.0, 1}));
  CHECK_THROWS(validate(RampProtocol{0.0, 0.0, 1e-6, 10, 1, 101}));
  CHECK_THROWS(simulate_cw(CWProtocol{1e-6, 1.0, 1e-3, 0.0, 1}, -1.0, 0.5));
}

}
