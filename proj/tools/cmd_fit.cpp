#include <iostream>

#include <fmt/format.h>

#include "commands.hpp"
#include "common.hpp"
#include "jjspd/constants.hpp"
#include "jjspd/device_io.hpp"
#include "jjspd/error.hpp"
#include "jjspd/fit.hpp"
#include "jjspd/report.hpp"

namespace jjspd::cli {

namespace fs = std::filesystem;

namespace {

std::vector<RateDataset> load_datasets(const std::vector<fs::path>& paths) {
  if (paths.empty()) {
    throw ConfigError("no rate data given (flag --data or config key 'data')");
  }
  std::vector<RateDataset> out;
  for (const auto& p : paths) {
    auto d = dataset_from_curve(rate_curve_from_table(read_table(p, "rate data")));
    if (d.label.empty()) {
      d.label = p.stem().string();
    }
    out.push_back(std::move(d));
  }
  return out;
}

JunctionParams junction_from_dark_fit(const Settings& s) {
  if (!s.has("dark_fit")) {
    throw DataError("light fits need the dark-fit report: run 'jjspd fit dark' first and pass --dark-fit");
  }
  const auto report = read_report(s.get_path("dark_fit"), "dark-fit report (run 'jjspd fit dark' first)");
  if (!report.contains("junction")) {
    throw DataError(fmt::format("'{}' is not a dark-fit report", s.get_path("dark_fit").string()));
  }
  return junction_from_json(report.at("junction"));
}

void print_fit(const FitResult& f) {
  for (const auto& p : f.parameters) {
    std::cout << fmt::format("{} = {:.6g} +- {:.2g} {}{}\n", p.name, p.value, p.uncertainty, p.unit,
                             p.at_bound ? " (at bound)" : "");
  }
  std::cout << fmt::format("chi2/dof = {:.4g} ({} points), converged = {}\n", f.reduced_chi_square, f.points,
                           f.converged);
  for (const auto& flag : f.flags) {
    std::cout << "flag: " << flag << '\n';
  }
}

FitOptions fit_options(const Settings& s) {
  FitOptions o;
  if (auto ir = s.maybe_number("mean_retrap_current_uA")) {
    o.mean_retrap_current = *ir * units::uA;
  }
  return o;
}

void run_dark(const Settings& s) {
  const auto paths = s.get_paths("data");
  const auto data = load_datasets(paths);
  if (data.size() != 1) {
    throw ConfigError("fit dark takes exactly one dataset");
  }
  const auto j = selected_junction(s);
  const auto result = fit_dark(data.front(), j, fit_options(s));
  print_fit(result.fit);
  write_report(s, "dark_fit.json",
               {{"fit", to_json(result.fit)}, {"junction", to_json(result.junction)}, {"inputs", input_digests(paths)}},
               std::nullopt);
}

void run_light(const Settings& s, bool retrap) {
  const auto j = junction_from_dark_fit(s);
  const auto paths = s.get_paths("data");
  const auto data = load_datasets(paths);
  const auto fit = retrap ? fit_light_retrap(data, j, fit_options(s)) : fit_light(data, j, fit_options(s));
  print_fit(fit);
  auto inputs = input_digests(paths);
  inputs.push_back({{"file", s.get_path("dark_fit").filename().string()}, {"sha256", file_sha256(s.get_path("dark_fit"))}});
  write_report(s, retrap ? "retrap_fit.json" : "light_fit.json",
               {{"fit", to_json(fit)}, {"junction", to_json(j)}, {"inputs", inputs}}, std::nullopt);
}

void run_gate(const Settings& s) {
  const auto& section = s.section();
  if (!section.contains("gates") || !section.at("gates").is_array() || section.at("gates").empty()) {
    throw ConfigError("fit gate: config section 'fit gate' needs a non-empty 'gates' list");
  }
  const auto base = selected_junction(s);
  std::vector<GateData> gates;
  std::vector<fs::path> all;
  for (const auto& g : section.at("gates")) {
    GateData gd;
    gd.label = g.value("label", fmt::format("gate{}", gates.size()));
    if (g.contains("critical_current_uA")) {
      gd.junction = with_critical_current(base, g.at("critical_current_uA").get<double>() * units::uA);
    } else if (g.contains("dark_fit")) {
      const auto p = s.config_dir() / g.at("dark_fit").get<std::string>();
      gd.junction = junction_from_json(read_report(p, "dark-fit report").at("junction"));
      all.push_back(p);
    } else {
      throw ConfigError(fmt::format("gate '{}': needs critical_current_uA or dark_fit", gd.label));
    }
    std::vector<fs::path> paths;
    for (const auto& p : g.at("data")) {
      paths.push_back(s.config_dir() / p.get<std::string>());
    }
    gd.curves = load_datasets(paths);
    all.insert(all.end(), paths.begin(), paths.end());
    gates.push_back(std::move(gd));
  }
  const auto fit = fit_gate_joint(gates, fit_options(s));
  print_fit(fit);
  write_report(s, "gate_fit.json", {{"fit", to_json(fit)}, {"inputs", input_digests(all)}}, std::nullopt);
}

void run_heating(const Settings& s) {
  const auto j = junction_from_dark_fit(s);
  const auto report = read_report(s.get_path("light_fit"), "light-fit report");
  const auto light_fit = fit_result_from_json(report.at("fit"));
  LightModelParams light{light_fit.value("escape_temperature"), light_fit.value("window"), 0.0, std::nullopt};
  const auto paths = s.get_paths("data");
  const auto data = load_datasets(paths);
  const auto h = heating_correction(data, j, light, s.get_number("reference_power_pW") * units::pW);
  for (std::size_t i = 0; i < h.power.size(); ++i) {
    std::cout << fmt::format("{:.0f} pW: I_c factor {:.5f} (raw {:.5f})\n", h.power[i] / units::pW, h.factor[i],
                             h.raw_factor[i]);
  }
  auto body = to_json(h);
  body["inputs"] = input_digests(paths);
  write_report(s, "heating.json", std::move(body), std::nullopt);
}

Settings& leaf(CLI::App& parent, Store& store, const char* name, const char* help) {
  auto* sub = parent.add_subcommand(name, help);
  auto& s = *store.emplace_back(std::make_unique<Settings>(*sub, std::string("fit ") + name));
  s.positional_paths("data", "Rate data files (CSV)");
  s.number("mean_retrap_current_uA", std::nullopt, "Measured <I_r> [uA] for the I_r0 diagnostic");
  return s;
}

}  // namespace

void add_fit_commands(CLI::App& app, Store& store) {
  auto* fit = app.add_subcommand("fit", "Parameter estimation from rate data");
  fit->require_subcommand(1);
  {
    auto& s = leaf(*fit, store, "dark", "I_c from a dark rate curve");
    device_options(s);
    fit->get_subcommand("dark")->callback([&s] {
      s.resolve();
      run_dark(s);
    });
  }
  for (const bool retrap : {false, true}) {
    auto& s = leaf(*fit, store, retrap ? "retrap" : "light",
                   retrap ? "(T*_esc, dt_1, I_r0) with retrapping" : "(T*_esc, dt_1) from illuminated rate curves");
    s.path("dark_fit", std::nullopt, "Report from 'fit dark'");
    fit->get_subcommand(retrap ? "retrap" : "light")->callback([&s, retrap] {
      s.resolve();
      run_light(s, retrap);
    });
  }
  {
    auto& s = leaf(*fit, store, "gate", "Shared (T*_esc, dt_1) across gate voltages (gates listed in --config)");
    device_options(s);
    fit->get_subcommand("gate")->callback([&s] {
      s.resolve();
      run_gate(s);
    });
  }
  {
    auto& s = leaf(*fit, store, "heating", "Per-power I_c correction at high laser power");
    s.path("dark_fit", std::nullopt, "Report from 'fit dark'");
    s.path("light_fit", std::nullopt, "Report from 'fit light'");
    s.number("reference_power_pW", std::nullopt, "Highest power used in the light fit [pW]");
    fit->get_subcommand("heating")->callback([&s] {
      s.resolve();
      run_heating(s);
    });
  }
}

}  // namespace jjspd::cli
