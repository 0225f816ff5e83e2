#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jjspd/analysis.hpp"
#include "jjspd/constants.hpp"
#include "jjspd/device_io.hpp"
#include "jjspd/escape.hpp"
#include "jjspd/fit.hpp"
#include "jjspd/optics.hpp"
#include "jjspd/quasiparticle.hpp"
#include "jjspd/simulate.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace jjspd;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

bool within_rel(double value, double target, double tol) { return std::abs(value - target) <= tol * std::abs(target); }

const fs::path data_dir = JJSPD_DATA_DIR;

JunctionParams device_junction(const std::string& name) {
  const auto devices = load_devices(data_dir / "devices.json");
  return derive_junction(find_device(devices, name)).params;
}

const BeamGeometry smf28{5.2 * units::um, 1550 * units::nm, 25.4 * units::mm};

struct Coupling {
  double x_eff;
  double alpha;
  double rate_per_100pW;
};

Coupling coupling(const std::string& profile, double width, double ratio) {
  const auto a = load_absorption_profile(data_dir / profile);
  const double x = effective_length(a, ratio);
  const double alpha = mean_absorption(a, x, Polarization::perpendicular);
  const double flux = photon_flux_density(smf28, photon_energy(smf28.wavelength));
  return {x, alpha, absorbed_photon_rate(flux, width, x, alpha, 100 * units::pW)};
}

Outcome golden_values() {
  std::vector<std::string> bad;
  auto check = [&](const std::string& what, bool ok, double value) {
    if (!ok) bad.push_back(fmt::format("{}={:.6g}", what, value));
  };
  const double w = beam_radius(smf28) / units::mm;
  check("w", within_rel(w, 2.41, 0.005), w);
  const double flux = photon_flux_density(smf28, 0.8 * units::eV) * 100 * units::pW * units::um * units::um;
  check("J", within_rel(flux, 85.5, 0.01), flux);
  const auto a = coupling("absorption_wide.csv", 2.8 * units::um, 0.33);
  const auto c = coupling("absorption_narrow.csv", 1.5 * units::um, 0.18);
  check("R_A", within_rel(a.rate_per_100pW, 53, 0.05), a.rate_per_100pW);
  check("R_C", within_rel(c.rate_per_100pW, 36, 0.05), c.rate_per_100pW);
  const double n = pulse_photon_number(250 * units::pW, 1e-3, photon_flux_density(smf28, photon_energy(smf28.wavelength)),
                                       effective_area(2.8 * units::um, a.x_eff), a.alpha);
  check("N_pulse", within_rel(n, 0.13, 0.02), n);
  const auto p = poisson_probabilities(n, 2);
  check("P0", std::abs(p[0] - 0.878) <= 0.005, p[0]);
  check("P1", std::abs(p[1] - 0.114) <= 0.005, p[1]);
  check("P2", std::abs(p[2] - 0.007) <= 0.005, p[2]);
  const auto j = device_junction("A");
  const double f0 = j.plasma_frequency / (2 * constants::pi) / units::GHz;
  check("f_p0", within_rel(f0, 225, 0.03), f0);
  check("Q0", within_rel(j.quality_factor, 1.12, 0.03), j.quality_factor);
  const double ej = j.josephson_energy / units::meV;
  check("E_J0", within_rel(ej, 25, 0.03), ej);
  const double wp = bias_point(j, 0.9 * j.critical_current).plasma_frequency;
  const double t_star = effective_temperature(qp_shot_noise(1.0, 11.5e-9), wp, 1.1, 20e-15);
  check("T*", t_star >= 1.0 / 1.5 && t_star <= 1.5, t_star);
  return {bad.empty(), bad.empty() ? fmt::format("w={:.4f} mm J={:.2f} R_A={:.2f} Hz R_C={:.2f} Hz N={:.4f} "
                                                 "P=({:.4f},{:.4f},{:.4f}) f_p0={:.1f} GHz Q0={:.3f} E_J0={:.2f} meV T*={:.3f} K",
                                                 w, flux, a.rate_per_100pW, c.rate_per_100pW, n, p[0], p[1], p[2], f0,
                                                 j.quality_factor, ej, t_star)
                                   : "out of tolerance: " + fmt::format("{}", fmt::join(bad, ", "))};
}

Outcome barrier_equivalence() {
  double lo = 1e9;
  double hi = -1e9;
  for (int i = 0; i < 100; ++i) {
    const double g = 0.9 + 0.099 * i / 99.0;
    const double r = barrier_approx(g, 1.0) / barrier_exact(g, 1.0);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo >= 0.99 && hi <= 1.01, fmt::format("approx/exact in [{:.5f}, {:.5f}] over 100 points", lo, hi)};
}

Outcome poisson_statistics() {
  const auto j = device_junction("A");
  const double bias = 10.9e-6;
  const double dead = 333e-6;
  const double target = 53.0;
  LightModelParams light{2.1, 0.86e-9, 1.0, std::nullopt};
  const double p = photon_switch_probability(j, bias, light);
  const double dark = rate_dark(j, bias / j.critical_current, j.base_temperature);
  const double raw = target / (1.0 - target * dead);
  CWProtocol cw{bias, 1e4, dead, (raw - dark) / p, 20240101};
  const auto trace = simulate_cw(cw, dark, p);
  const auto counts = bin_counts(trace, 1.0);
  const auto test = variance_mean_test(counts);
  const double ac = autocorrelation(counts, 1);
  const double rate = static_cast<double>(trace.events.size()) / cw.duration;
  return {test.ratio >= 0.9 && test.ratio <= 1.1 && std::abs(ac) < 0.03,
          fmt::format("count rate {:.2f} Hz, var/mean {:.4f}, lag-1 autocorrelation {:+.4f}", rate, test.ratio, ac)};
}

Outcome linearity() {
  const auto j = device_junction("A");
  const double bias = 10.9e-6;
  const double window = 1e-3;
  const std::size_t windows = 1000000;
  const std::size_t points = 400;
  LightModelParams light{2.1, 0.86e-9, 1.0, std::nullopt};
  const double p = photon_switch_probability(j, bias, light);
  const double dark = rate_dark(j, bias / j.critical_current, j.base_temperature);
  const double dark_probability = escape_probability(dark, window);

  std::vector<double> n(points), prob(points), sigma(points);
  for (std::size_t i = 0; i < points; ++i) {
    n[i] = 0.005 + (0.1 - 0.005) * static_cast<double>(i) / (points - 1);
    CWProtocol cw{bias, window * windows, 0.0, n[i] / window, 5000 + i};
    const auto w = window_switch_probability(simulate_cw(cw, dark, p), window);
    prob[i] = w.probability;
    sigma[i] = std::max(w.sigma, 1.0 / windows);
  }
  const auto fit = linearity_fit(n, prob, sigma);
  const double pull = (fit.offset - dark_probability) / fit.offset_error;
  const bool pass = std::abs(pull) <= 3.0 && fit.reduced_chi_square >= 0.7 && fit.reduced_chi_square <= 1.3;
  return {pass, fmt::format("slope {:.5f} (p_conv {:.5f}), offset {:.3e} +- {:.1e} vs dark {:.3e} ({:+.2f} sigma), "
                            "reduced chi2 {:.3f}",
                            fit.slope, p, fit.offset, fit.offset_error, dark_probability, pull, fit.reduced_chi_square)};
}

Outcome fd_roundtrip() {
  const auto j = device_junction("A");
  const double ramp = 1e-6;
  RampProtocol protocol{ramp, 0.8 * j.critical_current, j.critical_current, 100000, 777, 20001};
  auto rate = [&](double ib) { return ib >= j.critical_current ? INFINITY : rate_dark(j, ib / j.critical_current, j.base_temperature); };
  const auto samples = simulate_ramp(protocol, rate).switched();
  const auto curve = fd_transform(samples, ramp, 200);
  auto sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted[sorted.size() / 10];
  const double hi = sorted[sorted.size() * 9 / 10];
  double worst = 0.0;
  std::size_t used = 0;
  const auto& measured = curve.channel("rate_Hz");
  for (std::size_t k = 0; k < measured.size(); ++k) {
    const double ib = curve.bias_current[k];
    if (ib < lo || ib > hi) continue;
    worst = std::max(worst, std::abs(measured[k] / rate(ib) - 1.0));
    ++used;
  }
  return {used > 10 && worst <= 0.10,
          fmt::format("{} samples, {} bins in the central 80%, worst relative deviation {:.3f}", samples.size(), used, worst)};
}

Outcome fit_roundtrips() {
  const auto j = device_junction("A");
  std::vector<std::string> parts;
  bool pass = true;

  // Dark: Poisson counting plus 5% multiplicative scatter.
  {
    auto d = test::synthetic_rates(j, std::nullopt, 601);
    std::mt19937_64 engine(602);
    std::normal_distribution<double> noise(0.0, 0.05);
    for (std::size_t i = 0; i < d.rate.size(); ++i) {
      d.rate[i] *= std::exp(noise(engine));
      d.sigma_ln[i] = std::hypot(d.sigma_ln[i], 0.05);
    }
    const auto r = fit_dark(d, j);
    const double ic = r.fit.value("critical_current");
    const bool ok = within_rel(ic, j.critical_current, 0.005);
    pass = pass && ok;
    parts.push_back(fmt::format("dark {} I_c {:.4f} uA", ok ? "ok" : "FAIL", ic / units::uA));
  }

  // Retrapping at the reference parameters, about 1e5 events.
  {
    test::Sweep sweep;
    sweep.plan.target_events = 2500;
    std::vector<RateDataset> data;
    for (double rate : {53.0, 106.0}) {
      data.push_back(test::synthetic_rates(j, LightModelParams{2.1, 0.86e-9, rate, 8.55e-6}, 610 + data.size(), sweep));
    }
    double events = 0.0;
    for (const auto& d : data) events += test::event_count(d);
    const auto r = fit_light_retrap(data, j);
    const double t = r.value("escape_temperature");
    const double w = r.value("window");
    const double ir = r.value("retrap_current");
    const bool ok = within_rel(t, 2.1, 0.10) && within_rel(w, 0.86e-9, 0.10) && within_rel(ir, 8.55e-6, 0.10);
    pass = pass && ok;
    parts.push_back(fmt::format("retrap {} T* {:.3f} K dt1 {:.3f} ns I_r0 {:.3f} uA ({:.0f} events, clamped fraction {:.2f})",
                                ok ? "ok" : "FAIL", t, w / units::ns, ir / units::uA, events,
                                r.diagnostic("clamped_fraction").value_or(NAN)));
  }

  // Four gates sharing (T*, dt1).
  {
    std::vector<GateData> gates;
    for (double ic : {10.6, 11.1, 11.6, 11.99}) {
      const auto g = with_critical_current(j, ic * units::uA);
      const std::string label = fmt::format("{:.2f}uA", ic);
      gates.push_back({label, g, {test::synthetic_rates(g, LightModelParams{2.1, 0.86e-9, 53.0, std::nullopt}, 620 + gates.size())}});
    }
    const auto r = fit_gate_joint(gates);
    const double t = r.value("escape_temperature");
    const double w = r.value("window");
    const bool ok = within_rel(t, 2.1, 0.10) && within_rel(w, 0.86e-9, 0.10);
    pass = pass && ok;
    parts.push_back(fmt::format("gates {} T* {:.3f} K dt1 {:.3f} ns", ok ? "ok" : "FAIL", t, w / units::ns));
  }
  return {pass, fmt::format("{}", fmt::join(parts, "; "))};
}

RateDataset reference(const std::string& file) {
  return dataset_from_curve(rate_curve_from_table(ColumnTable::read(data_dir / "reference" / file)));
}

Outcome reference_consistency() {
  struct Case {
    std::string device;
    double t_star;
    double window;
  };
  bool pass = true;
  std::vector<std::string> parts;
  for (const Case& c : {Case{"A", 2.1, 0.86e-9}, Case{"B", 1.8, 0.67e-9}}) {
    const auto dark = fit_dark(reference("device" + c.device + "_dark.csv"), device_junction(c.device));
    const std::vector<RateDataset> lit = {reference("device" + c.device + "_100pW.csv"),
                                          reference("device" + c.device + "_200pW.csv")};
    const auto r = fit_light(lit, dark.junction);
    const double t = r.value("escape_temperature");
    const double w = r.value("window");
    const bool ok = within_rel(t, c.t_star, 0.15) && within_rel(w, c.window, 0.15);
    pass = pass && ok;
    parts.push_back(fmt::format("{} {} I_c {:.3f} uA T* {:.3f} K dt1 {:.3f} ns", c.device, ok ? "ok" : "FAIL",
                                dark.junction.critical_current / units::uA, t, w / units::ns));
  }
  return {pass, fmt::format("{}", fmt::join(parts, "; "))};
}

Outcome pulsed_protocol() {
  const auto j = device_junction("A");
  const double per_joule = 0.13 / (250 * units::fJ);
  const LightModelParams light{2.1, 0.86e-9, 0.0, std::nullopt};
  struct Pair {
    double power_pW, duration_ms;
  };
  std::vector<PulseResult> results;
  for (const Pair& pr : {Pair{250, 1}, Pair{500, 0.5}, Pair{1000, 0.25}, Pair{2500, 0.1}, Pair{5000, 0.05}}) {
    PulseProtocol p;
    p.pulse_power = pr.power_pW * units::pW;
    p.pulse_duration = pr.duration_ms * units::ms;
    p.rep_rate = 1.0;
    p.bias_current = 11.0e-6;
    p.pulses = 100000;
    p.seed = 800 + results.size();
    results.push_back(simulate_pulse(p, j, light, per_joule));
  }
  double sw = 0.0;
  double swp = 0.0;
  for (const auto& r : results) {
    sw += 1.0 / (r.error * r.error);
    swp += r.probability / (r.error * r.error);
  }
  const double mean = swp / sw;
  double worst = 0.0;
  std::vector<std::string> ps;
  for (const auto& r : results) {
    worst = std::max(worst, std::abs(r.probability - mean) / r.error);
    ps.push_back(fmt::format("{:.4f}", r.probability));
  }
  return {worst <= 3.0, fmt::format("N {:.3f}, p = [{}], largest deviation {:.2f} sigma", results[0].mean_photons,
                                    fmt::join(ps, ", "), worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path work = fs::temp_directory_path() / "jjspd_acceptance_determinism";
  fs::remove_all(work);
  const std::string devices = (data_dir / "devices.json").string();
  struct Run {
    std::string args;
    std::string file;
  };
  const std::vector<Run> runs = {
      {"simulate cw --bias-uA 10.9 --duration-s 200 --escape-temperature-K 2.1 --window-ns 0.86 --photon-rate-Hz 940",
       "trace.csv"},
      {"simulate ramp --trials 2000", "ramp.csv"},
      {"simulate pulse --pulse-power-pW 250 --pulse-duration-ns 1e6 --rep-rate-Hz 1 --bias-uA 11.2 --pulses 5000 "
       "--escape-temperature-K 2.1 --window-ns 0.86 --photons-per-fJ 0.00052",
       "pulse.csv"},
      {"simulate rates --escape-temperature-K 2.1 --window-ns 0.86 --photon-rate-Hz 53", "rates_sampled.csv"},
  };
  std::size_t identical = 0;
  std::vector<std::string> bad;
  for (const auto& r : runs) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "4"}) {
      const fs::path dir = work / (r.file + "_" + threads);
      const std::string cmd = fmt::format("\"{}\" --threads {} {} --devices \"{}\" --device A --seed 99 --output-dir \"{}\" > /dev/null",
                                          JJSPD_CLI, threads, r.args, devices, dir.string());
      if (std::system(cmd.c_str()) != 0) {
        bad.push_back(r.file + " (command failed)");
        break;
      }
      outputs.push_back(slurp(dir / r.file));
    }
    if (outputs.size() == 2 && !outputs[0].empty() && outputs[0] == outputs[1]) {
      ++identical;
    } else if (outputs.size() == 2) {
      bad.push_back(r.file);
    }
  }
  return {identical == runs.size(),
          bad.empty() ? fmt::format("{} simulate commands byte-identical on rerun (1 and 4 threads)", identical)
                      : fmt::format("differing outputs: {}", fmt::join(bad, ", "))};
}

Outcome flux_conservation() {
  const double x = 100e-9;
  const double d = 0.55e-4;
  auto f = [&](double t) { return diffusion_current(x, t, d); };
  const double tau = diffusion_time(x, d);
  const double head = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, tau, 15, 1e-12);
  const double tail = boost::math::quadrature::exp_sinh<double>().integrate(f, tau, INFINITY);
  const double ratio = (head + tail) / (0.5 * constants::elementary_charge);
  return {std::abs(ratio - 1.0) <= 0.005, fmt::format("integral / (e/2) = {:.8f}", ratio)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 golden values", golden_values},
      {"2 barrier equivalence", barrier_equivalence},
      {"3 Poisson statistics", poisson_statistics},
      {"4 single-photon linearity", linearity},
      {"5 Fulton-Dunkleberger roundtrip", fd_roundtrip},
      {"6 fit roundtrips", fit_roundtrips},
      {"7 reference dataset fits", reference_consistency},
      {"8 pulsed protocol", pulsed_protocol},
      {"9 determinism", determinism},
      {"10 diffusion flux conservation", flux_conservation},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("{} criterion {}: {} [{:.1f} s]\n", o.pass ? "PASS" : "FAIL", name, o.detail, seconds);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
