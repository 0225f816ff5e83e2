#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "jjspd/constants.hpp"
#include "jjspd/error.hpp"
#include "jjspd/quasiparticle.hpp"
#include "support.hpp"

using namespace jjspd;

namespace {
constexpr double x0 = 100e-9;
constexpr double d_nbn = 0.55e-4;
}  // namespace

TEST_SUITE("quasiparticle") {

TEST_CASE("time scales of the diffusion pulse") {
  CHECK(diffusion_time(x0, d_nbn) == doctest::Approx(1.818181818e-10).epsilon(1e-9));
  CHECK(diffusion_peak_time(x0, d_nbn) == doctest::Approx(3.0303030303e-11).epsilon(1e-9));
  const double tp = diffusion_peak_time(x0, d_nbn);
  const double h = tp * 1e-4;
  CHECK(diffusion_current(x0, tp, d_nbn) > diffusion_current(x0, tp - h, d_nbn));
  CHECK(diffusion_current(x0, tp, d_nbn) > diffusion_current(x0, tp + h, d_nbn));
  CHECK(diffusion_current(x0, 0.0, d_nbn) == 0.0);
  CHECK_THROWS_AS(diffusion_current(x0, -1.0, d_nbn), DomainError);
}

TEST_CASE("one quasiparticle delivers half an electron charge") {
  auto f = [](double t) { return diffusion_current(x0, t, d_nbn); };
  const double tau = diffusion_time(x0, d_nbn);
  const double head = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, tau, 15, 1e-13);
  const double tail = boost::math::quadrature::exp_sinh<double>().integrate(f, tau, INFINITY);
  CHECK((head + tail) / constants::elementary_charge == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("the printed expression is not a current") {
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wdeprecated-declarations"
  const double t = 1e-10;
  const double printed = diffusion_current_printed(x0, t, d_nbn);
#pragma GCC diagnostic pop
  CHECK(printed == doctest::Approx(diffusion_current(x0, t, d_nbn) * t).epsilon(1e-12));
}

TEST_CASE("quasiparticle count") {
  const double gap = 1.52 * units::meV;
  CHECK(qp_count(0.79989805 * units::eV, gap, 0.57) == doctest::Approx(299.96).epsilon(1e-4));
  CHECK(qp_count(0.8 * units::eV, gap, 0.57) == doctest::Approx(300.0).epsilon(1e-12));
  CHECK_THROWS_AS(validate(QPModelParams{1.2, gap}), DomainError);
}

TEST_CASE("effective temperature from shot noise") {
  const double s = qp_shot_noise(1.0, 11.5e-9);
  CHECK(s == doctest::Approx(3.6850062582e-27).epsilon(1e-10));
  const double wp = 9.39277e11;
  const double t = effective_temperature(s, wp, 1.1, 20e-15);
  CHECK(t == doctest::Approx(1.0514431).epsilon(1e-6));
  CHECK(t > 1.0 / 1.5);
  CHECK(t < 1.5);
  CHECK_THROWS_AS(effective_temperature(0.0, wp, 1.1, 20e-15), DomainError);
}

TEST_CASE("weak-noise limit agrees for small noise") {
  const double wp = 9.39277e11;
  for (double s : {1e-32, 1e-30, 1e-29}) {
    const double exact = effective_temperature(s, wp, 1.1, 20e-15);
    const double weak = effective_temperature_weak_noise(s, wp, 1.1, 20e-15);
    CHECK(weak == doctest::Approx(exact).epsilon(0.01));
  }
  double last = 0.0;
  for (double s = 1e-30; s < 1e-24; s *= 3) {
    const double t = effective_temperature(s, wp, 1.1, 20e-15);
    CHECK(t > last);
    last = t;
  }
}

TEST_CASE("diffusion faster than the plasma oscillation is flagged") {
  QPModelParams qp;
  qp.gap = 1.52 * units::meV;
  const auto a = effective_temperature_from_current(qp, 11.5e-9, 9.39277e11, 1.1, 20e-15);
  CHECK_FALSE(a.out_of_model);
  CHECK(a.temperature == doctest::Approx(1.0514431).epsilon(1e-6));
  const auto slow_plasma = effective_temperature_from_current(qp, 11.5e-9, 1e9, 1.1, 20e-15);
  CHECK(slow_plasma.out_of_model);
}

}
