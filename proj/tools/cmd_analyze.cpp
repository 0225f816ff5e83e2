#include <iostream>

#include <fmt/format.h>

#include "commands.hpp"
#include "common.hpp"
#include "jjspd/analysis.hpp"
#include "jjspd/constants.hpp"
#include "jjspd/error.hpp"

namespace jjspd::cli {

namespace {

std::string_view verdict_name(Dispersion d) {
  switch (d) {
    case Dispersion::sub_poissonian:
      return "sub_poissonian";
    case Dispersion::super_poissonian:
      return "super_poissonian";
    default:
      return "poissonian";
  }
}

void run_counts(const Settings& s) {
  const auto table = read_table(s.get_path("trace"), "event trace");
  const auto trace = event_trace_from_table(table);
  const double width = s.get_number("bin_s");
  const auto counts = bin_counts(trace, width);
  const auto h = poisson_fit(counts, width);
  const auto t = variance_mean_test(counts, s.get_number("confidence"));
  const double rho = autocorrelation(counts, 1);
  std::cout << fmt::format("mean = {:.4f}, var/mean = {:.4f} [{:.4f}, {:.4f}] -> {}, lag-1 r = {:.4f}\n", h.mean,
                           t.ratio, t.lower, t.upper, verdict_name(t.verdict), rho);
  write_report(s, "counts.json",
               {{"bins", counts.size()},
                {"bin_width_s", width},
                {"mean", h.mean},
                {"variance", h.variance},
                {"ratio", t.ratio},
                {"ratio_lower", t.lower},
                {"ratio_upper", t.upper},
                {"verdict", verdict_name(t.verdict)},
                {"lag1_autocorrelation", rho},
                {"observed", h.observed},
                {"predicted", h.predicted},
                {"inputs", input_digests({s.get_path("trace")})}},
               trace.seed);
}

void run_linearity(const Settings& s) {
  const auto table = read_table(s.get_path("input"), "linearity table");
  const auto n = table.numeric_column("mean_photons");
  const auto p = table.numeric_column("probability");
  const auto sigma = table.numeric_column("sigma");
  const auto f = linearity_fit(n, p, sigma);
  std::cout << fmt::format("slope = {:.6g} +- {:.2g}, offset = {:.6g} +- {:.2g}, chi2/dof = {:.3f}\n", f.slope,
                           f.slope_error, f.offset, f.offset_error, f.reduced_chi_square);
  write_report(s, "linearity.json",
               {{"slope", f.slope},
                {"slope_error", f.slope_error},
                {"offset", f.offset},
                {"offset_error", f.offset_error},
                {"chi_square", f.chi_square},
                {"reduced_chi_square", f.reduced_chi_square},
                {"dof", f.dof},
                {"offset_constrained", f.offset_constrained},
                {"inputs", input_digests({s.get_path("input")})}},
               std::nullopt);
}

std::vector<double> read_samples(const Settings& s, double* ramp_rate) {
  const auto table = read_table(s.get_path("samples"), "switching-current samples");
  if (ramp_rate) {
    if (auto r = s.maybe_number("ramp_rate_uA_per_s")) {
      *ramp_rate = *r * units::uA;
    } else if (auto m = table.metadata().get_number("ramp_rate_A_per_s")) {
      *ramp_rate = *m;
    } else {
      throw ConfigError("analyze fd: ramp_rate_uA_per_s is required (not recorded in the samples file)");
    }
  }
  return table.numeric_column("I_s_A");
}

void run_fd(const Settings& s) {
  double ramp = 0.0;
  const auto samples = read_samples(s, &ramp);
  auto curve = fd_transform(samples, ramp, s.get_integer("bins"));
  curve.metadata.set("samples", static_cast<std::int64_t>(samples.size()));
  std::cout << fmt::format("{} rate points from {} samples\n", curve.bias_current.size(), samples.size());
  write_table(s, "fd.csv", to_table(curve), std::nullopt);
}

void run_shape(const Settings& s) {
  const auto samples = read_samples(s, nullptr);
  const auto st = distribution_shape_stats(samples);
  std::cout << fmt::format("mean = {:.6g} A, std = {:.4g} A, skewness = {:.4f} (n = {})\n", st.mean, st.std_dev,
                           st.skewness, st.samples);
  write_report(s, "shape.json",
               {{"mean_A", st.mean},
                {"std_A", st.std_dev},
                {"skewness", st.skewness},
                {"samples", st.samples},
                {"inputs", input_digests({s.get_path("samples")})}},
               std::nullopt);
}

template <class F>
void leaf(CLI::App& parent, Store& store, const char* name, const char* help, F&& configure, void (*run)(const Settings&)) {
  auto* sub = parent.add_subcommand(name, help);
  auto& s = *store.emplace_back(std::make_unique<Settings>(*sub, std::string("analyze ") + name));
  configure(s);
  sub->callback([&s, run] {
    s.resolve();
    run(s);
  });
}

}  // namespace

void add_analyze_commands(CLI::App& app, Store& store) {
  auto* an = app.add_subcommand("analyze", "Statistics on event data");
  an->require_subcommand(1);
  leaf(*an, store, "counts", "Poisson fit and dispersion test of binned counts",
       [](Settings& s) {
         s.path("trace", std::nullopt, "Event trace (CSV)");
         s.number("bin_s", 1.0, "Bin width [s]");
         s.number("confidence", 0.99, "Two-sided level of the dispersion test");
       },
       run_counts);
  leaf(*an, store, "linearity", "Weighted line through switching probability vs <N>",
       [](Settings& s) { s.path("input", std::nullopt, "CSV with mean_photons, probability, sigma"); }, run_linearity);
  leaf(*an, store, "fd", "Switching currents -> escape rate",
       [](Settings& s) {
         s.path("samples", std::nullopt, "Switching currents (CSV, column I_s_A)");
         s.number("ramp_rate_uA_per_s", std::nullopt, "Ramp rate [uA/s] (default from the samples file)");
         s.integer("bins", 200, "Histogram bins");
       },
       run_fd);
  leaf(*an, store, "shape", "Mean, spread and skewness of switching currents",
       [](Settings& s) { s.path("samples", std::nullopt, "Switching currents (CSV, column I_s_A)"); }, run_shape);
}

}  // namespace jjspd::cli
