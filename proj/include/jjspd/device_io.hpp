#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "jjspd/junction.hpp"

namespace jjspd {

/// Keys every device record must carry (human units in the key suffix).
const std::vector<std::string>& required_device_fields();

/// Parses `{"devices": [ {...}, ... ]}`; record order is preserved.
std::vector<DeviceConfig> devices_from_json(const nlohmann::json& doc);
std::vector<DeviceConfig> load_devices(const std::filesystem::path& path);

/// Looks a device up by name; throws ConfigError listing known names.
const DeviceConfig& find_device(const std::vector<DeviceConfig>& devices, const std::string& name);

nlohmann::json to_json(const JunctionParams& junction);
JunctionParams junction_from_json(const nlohmann::json& j);

}  // namespace jjspd
