#include "common.hpp"

#include <iostream>

#include <fmt/format.h>

#include "jjspd/constants.hpp"
#include "jjspd/device_io.hpp"
#include "jjspd/error.hpp"
#include "jjspd/report.hpp"

namespace jjspd::cli {

namespace fs = std::filesystem;

void device_options(Settings& s) {
  s.path("devices", std::nullopt, "Device file (JSON)");
  s.text("device", std::nullopt, "Device name");
  s.number("critical_current_uA", std::nullopt, "Override I_c [uA]");
}

JunctionParams selected_junction(const Settings& s) {
  const auto devices = load_devices(s.get_path("devices"));
  auto device = find_device(devices, s.get_text("device"));
  if (auto ic = s.maybe_number("critical_current_uA")) {
    device.critical_current = *ic * units::uA;
  }
  return derive_junction(device).params;
}

void light_options(Settings& s) {
  s.number("escape_temperature_K", std::nullopt, "T*_esc [K]; enables the light model");
  s.number("window_ns", std::nullopt, "dt_1 [ns]");
  s.number("photon_rate_Hz", 0.0, "Absorbed photon rate [Hz]");
  s.number("retrap_current_uA", std::nullopt, "I_r0 [uA]; enables retrapping");
}

std::optional<LightModelParams> selected_light(const Settings& s) {
  const auto t = s.maybe_number("escape_temperature_K");
  if (!t) {
    return std::nullopt;
  }
  LightModelParams light;
  light.escape_temperature = *t;
  light.window = s.get_number("window_ns") * units::ns;
  light.photon_rate = s.get_number("photon_rate_Hz");
  if (auto ir = s.maybe_number("retrap_current_uA")) {
    light.retrap_current = *ir * units::uA;
  }
  return light;
}

Metadata header(const Settings& s, std::optional<std::uint64_t> seed) {
  return run_metadata(s.command(), seed, s.digest());
}

nlohmann::json header_json(const Settings& s, std::optional<std::uint64_t> seed) {
  nlohmann::json out = nlohmann::json::object();
  const auto meta = header(s, seed);
  for (const auto& [k, v] : meta.entries()) {
    out[k] = v;
  }
  return out;
}

void write_table(const Settings& s, const std::string& name, ColumnTable table, std::optional<std::uint64_t> seed) {
  auto meta = header(s, seed);
  meta.merge(table.metadata());
  table.metadata() = meta;
  const auto path = s.output_path(s.maybe_text("output").value_or(name));
  table.write(path);
  std::cout << "wrote " << path.string() << '\n';
}

void write_report(const Settings& s, const std::string& name, nlohmann::json body, std::optional<std::uint64_t> seed) {
  body["metadata"] = header_json(s, seed);
  const auto path = s.output_path(s.maybe_text("output").value_or(name));
  write_json(path, body);
  std::cout << "wrote " << path.string() << '\n';
}

ColumnTable read_table(const fs::path& path, const std::string& what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw DataError(fmt::format("{} '{}' not found", what, path.string()));
  }
  return ColumnTable::read(path);
}

nlohmann::json read_report(const fs::path& path, const std::string& what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw DataError(fmt::format("{} '{}' not found", what, path.string()));
  }
  return read_json(path);
}

nlohmann::json input_digests(const std::vector<fs::path>& paths) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : paths) {
    out.push_back({{"file", p.filename().string()}, {"sha256", file_sha256(p)}});
  }
  return out;
}

}  // namespace jjspd::cli
