#include "jjspd/device_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "jjspd/constants.hpp"
#include "jjspd/error.hpp"

namespace jjspd {

using nlohmann::json;

namespace {

double required(const json& rec, const std::string& device, const char* key) {
  if (!rec.contains(key)) {
    throw ConfigError("device '" + device + "': missing required field '" + key + "'");
  }
  if (!rec.at(key).is_number()) {
    throw ConfigError("device '" + device + "': field '" + key + "' must be a number");
  }
  return rec.at(key).get<double>();
}

std::optional<double> optional_number(const json& rec, const std::string& device, const char* key) {
  if (!rec.contains(key) || rec.at(key).is_null()) {
    return std::nullopt;
  }
  if (!rec.at(key).is_number()) {
    throw ConfigError("device '" + device + "': field '" + key + "' must be a number");
  }
  return rec.at(key).get<double>();
}

std::string joined_required_fields() {
  std::string out;
  for (const auto& f : required_device_fields()) {
    out += (out.empty() ? "" : ", ") + f;
  }
  return out;
}

}  // namespace

const std::vector<std::string>& required_device_fields() {
  static const std::vector<std::string> fields = {
      "name",
      "width_um",
      "channel_length_measured_nm",
      "channel_length_design_nm",
      "graphene_layers",
      "normal_resistance_ohm",
      "gap_meV",
      "electron_density_cm2",
      "mobility_cm2_per_Vs",
      "base_temperature_K",
  };
  return fields;
}

std::vector<DeviceConfig> devices_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("devices") || !doc.at("devices").is_array() ||
      doc.at("devices").empty()) {
    throw ConfigError("device file contains no device records; each record needs: " +
                      joined_required_fields());
  }
  std::vector<DeviceConfig> out;
  std::size_t index = 0;
  for (const auto& rec : doc.at("devices")) {
    ++index;
    if (!rec.contains("name") || !rec.at("name").is_string()) {
      throw ConfigError("device record " + std::to_string(index) + ": missing required field 'name'");
    }
    DeviceConfig d;
    d.name = rec.at("name").get<std::string>();
    d.width = required(rec, d.name, "width_um") * units::um;
    d.channel_length_measured = required(rec, d.name, "channel_length_measured_nm") * units::nm;
    d.channel_length_design = required(rec, d.name, "channel_length_design_nm") * units::nm;
    d.graphene_layers = static_cast<int>(required(rec, d.name, "graphene_layers"));
    d.normal_resistance = required(rec, d.name, "normal_resistance_ohm");
    d.gap = required(rec, d.name, "gap_meV") * units::meV;
    d.electron_density = required(rec, d.name, "electron_density_cm2") * units::per_cm2;
    d.mobility = required(rec, d.name, "mobility_cm2_per_Vs") * units::cm2_per_Vs;
    d.base_temperature = required(rec, d.name, "base_temperature_K");
    d.fermi_velocity = optional_number(rec, d.name, "fermi_velocity_m_per_s").value_or(1e6);
    d.v_cnp = optional_number(rec, d.name, "v_cnp_V");
    d.polarization_ratio = optional_number(rec, d.name, "polarization_ratio");
    if (auto v = optional_number(rec, d.name, "critical_current_uA")) {
      d.critical_current = *v * units::uA;
    }
    if (auto v = optional_number(rec, d.name, "capacitance_fF")) {
      d.capacitance = *v * units::fF;
    }
    if (auto v = optional_number(rec, d.name, "mean_switching_current_uA")) {
      d.mean_switching_current = *v * units::uA;
    }
    validate(d);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<DeviceConfig> load_devices(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open device file " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("device file " + path.string() + ": " + e.what());
  }
  return devices_from_json(doc);
}

const DeviceConfig& find_device(const std::vector<DeviceConfig>& devices, const std::string& name) {
  std::string known;
  for (const auto& d : devices) {
    if (d.name == name) {
      return d;
    }
    known += (known.empty() ? "" : ", ") + d.name;
  }
  throw ConfigError("unknown device '" + name + "' (known: " + known + ")");
}

json to_json(const JunctionParams& j) {
  return json{
      {"critical_current_A", j.critical_current},
      {"normal_resistance_ohm", j.normal_resistance},
      {"capacitance_F", j.capacitance},
      {"josephson_energy_J", j.josephson_energy},
      {"plasma_frequency_rad_per_s", j.plasma_frequency},
      {"quality_factor", j.quality_factor},
      {"gap_J", j.gap},
      {"base_temperature_K", j.base_temperature},
      {"thouless_energy_J", j.thouless_energy},
      {"diffusivity_m2_per_s", j.diffusivity},
      {"mean_free_path_m", j.mean_free_path},
  };
}

JunctionParams junction_from_json(const json& j) {
  auto get = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
      throw DataError(std::string("junction record: missing numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
  };
  JunctionParams p = make_junction(get("critical_current_A"), get("normal_resistance_ohm"),
                                   get("capacitance_F"), get("gap_J"), get("base_temperature_K"));
  p.thouless_energy = j.value("thouless_energy_J", 0.0);
  p.diffusivity = j.value("diffusivity_m2_per_s", 0.0);
  p.mean_free_path = j.value("mean_free_path_m", 0.0);
  return p;
}

}  // namespace jjspd
