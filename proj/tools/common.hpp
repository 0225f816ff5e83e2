#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "jjspd/escape.hpp"
#include "jjspd/junction.hpp"
#include "jjspd/table_io.hpp"
#include "settings.hpp"

namespace jjspd::cli {

/// Registers devices/device/critical_current_uA.
void device_options(Settings& s);
/// Junction of the selected device, with the I_c override applied.
JunctionParams selected_junction(const Settings& s);

/// Registers escape_temperature_K/window_ns/photon_rate_Hz/retrap_current_uA.
void light_options(Settings& s);
/// Light model when escape_temperature_K is set.
std::optional<LightModelParams> selected_light(const Settings& s);

Metadata header(const Settings& s, std::optional<std::uint64_t> seed);
nlohmann::json header_json(const Settings& s, std::optional<std::uint64_t> seed);

void write_table(const Settings& s, const std::string& name, ColumnTable table, std::optional<std::uint64_t> seed);
void write_report(const Settings& s, const std::string& name, nlohmann::json body, std::optional<std::uint64_t> seed);

/// Reads a required input file; a missing file is a data error naming `what`.
ColumnTable read_table(const std::filesystem::path& path, const std::string& what);
nlohmann::json read_report(const std::filesystem::path& path, const std::string& what);

nlohmann::json input_digests(const std::vector<std::filesystem::path>& paths);

}  // namespace jjspd::cli
