#include "settings.hpp"

#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

#include "jjspd/error.hpp"
#include "jjspd/report.hpp"

namespace jjspd::cli {

namespace fs = std::filesystem;

namespace {

std::string flag_name(const std::string& key) {
  std::string f = key;
  for (auto& c : f) {
    if (c == '_') {
      c = '-';
    }
  }
  return "--" + f;
}

}  // namespace

Settings::Settings(CLI::App& app, std::string command) : app_(app), command_(std::move(command)) {
  app_.add_option("--config", config_file_, "JSON config; flags override its values");
  const char* env = std::getenv("JJSPD_OUTPUT_DIR");
  text("output_dir", std::string(env && *env ? env : "."), "Output directory (default $JJSPD_OUTPUT_DIR or .)");
  text("output", std::nullopt, "Output file, relative to the output directory");
}

void Settings::add(const std::string& key, Kind kind, nlohmann::json fallback, CLI::Option* option,
                   std::function<nlohmann::json()> flag_value) {
  values_[key] = std::move(fallback);
  entries_.emplace_back(key, Entry{kind, option, std::move(flag_value)});
}

void Settings::number(const std::string& key, std::optional<double> fallback, const std::string& help) {
  auto v = std::make_shared<double>();
  auto* opt = app_.add_option(flag_name(key), *v, help);
  add(key, Kind::number, fallback ? nlohmann::json(*fallback) : nlohmann::json(nullptr), opt,
      [v] { return nlohmann::json(*v); });
}

void Settings::integer(const std::string& key, std::optional<std::uint64_t> fallback, const std::string& help) {
  auto v = std::make_shared<std::uint64_t>();
  auto* opt = app_.add_option(flag_name(key), *v, help);
  add(key, Kind::integer, fallback ? nlohmann::json(*fallback) : nlohmann::json(nullptr), opt,
      [v] { return nlohmann::json(*v); });
}

void Settings::text(const std::string& key, std::optional<std::string> fallback, const std::string& help) {
  auto v = std::make_shared<std::string>();
  auto* opt = app_.add_option(flag_name(key), *v, help);
  add(key, Kind::text, fallback ? nlohmann::json(*fallback) : nlohmann::json(nullptr), opt,
      [v] { return nlohmann::json(*v); });
}

void Settings::path(const std::string& key, std::optional<std::string> fallback, const std::string& help) {
  auto v = std::make_shared<std::string>();
  auto* opt = app_.add_option(flag_name(key), *v, help);
  add(key, Kind::path, fallback ? nlohmann::json(*fallback) : nlohmann::json(nullptr), opt,
      [v] { return nlohmann::json(*v); });
}

void Settings::paths(const std::string& key, const std::string& help) {
  auto v = std::make_shared<std::vector<std::string>>();
  auto* opt = app_.add_option(flag_name(key), *v, help);
  add(key, Kind::paths, nlohmann::json::array(), opt, [v] { return nlohmann::json(*v); });
}

void Settings::positional_paths(const std::string& key, const std::string& help) {
  auto v = std::make_shared<std::vector<std::string>>();
  auto* opt = app_.add_option(key + "," + flag_name(key), *v, help);
  add(key, Kind::paths, nlohmann::json::array(), opt, [v] { return nlohmann::json(*v); });
}

void Settings::numbers(const std::string& key, const std::string& help) {
  auto v = std::make_shared<std::vector<double>>();
  auto* opt = app_.add_option(flag_name(key), *v, help)->delimiter(',');
  add(key, Kind::numbers, nlohmann::json::array(), opt, [v] { return nlohmann::json(*v); });
}

nlohmann::json Settings::resolve_paths(Kind kind, const nlohmann::json& value, const fs::path& base) const {
  auto one = [&](const std::string& p) {
    const fs::path q(p);
    return (q.is_absolute() || base.empty()) ? q.lexically_normal().string() : (base / q).lexically_normal().string();
  };
  if (kind == Kind::path && value.is_string()) {
    return one(value.get<std::string>());
  }
  if (kind == Kind::paths && value.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : value) {
      out.push_back(one(p.get<std::string>()));
    }
    return out;
  }
  return value;
}

void Settings::resolve() {
  if (!config_file_.empty()) {
    std::ifstream in(config_file_);
    if (!in) {
      throw ConfigError(fmt::format("cannot open config file '{}'", config_file_));
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(fmt::format("config file '{}': {}", config_file_, e.what()));
    }
    if (!doc.is_object()) {
      throw ConfigError(fmt::format("config file '{}' must hold a JSON object", config_file_));
    }
    config_dir_ = fs::absolute(fs::path(config_file_)).parent_path();
    // Shared top-level keys first, then the section named after the command.
    for (const auto& [key, entry] : entries_) {
      if (doc.contains(key) && !doc.at(key).is_object()) {
        values_[key] = resolve_paths(entry.kind, doc.at(key), config_dir_);
      }
    }
    if (doc.contains(command_)) {
      section_ = doc.at(command_);
      if (!section_.is_object()) {
        throw ConfigError(fmt::format("config section '{}' must be an object", command_));
      }
      for (const auto& [key, value] : section_.items()) {
        const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
        if (it == entries_.end()) {
          continue;  // structured entries read via section()
        }
        values_[key] = resolve_paths(it->second.kind, value, config_dir_);
      }
    }
  }
  for (const auto& [key, entry] : entries_) {
    if (entry.option->count() > 0) {
      values_[key] = entry.flag_value();
    }
  }
  if (!values_.at("output_dir").is_null()) {
    values_["output_dir"] = resolve_paths(Kind::path, values_.at("output_dir"), {});
  }
}

bool Settings::has(const std::string& key) const { return values_.contains(key) && !values_.at(key).is_null(); }

namespace {
[[noreturn]] void missing(const std::string& command, const std::string& key) {
  throw ConfigError(fmt::format("{}: missing required setting '{}' (flag {} or config key '{}')", command, key,
                                flag_name(key), key));
}
}  // namespace

double Settings::get_number(const std::string& key) const {
  if (!has(key)) {
    missing(command_, key);
  }
  const auto& v = values_.at(key);
  if (!v.is_number()) {
    throw ConfigError(fmt::format("{}: setting '{}' must be a number", command_, key));
  }
  return v.get<double>();
}

std::optional<double> Settings::maybe_number(const std::string& key) const {
  if (!has(key)) {
    return std::nullopt;
  }
  return get_number(key);
}

std::uint64_t Settings::get_integer(const std::string& key) const {
  if (!has(key)) {
    missing(command_, key);
  }
  const auto& v = values_.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(fmt::format("{}: setting '{}' must be a non-negative integer", command_, key));
  }
  return v.get<std::uint64_t>();
}

std::string Settings::get_text(const std::string& key) const {
  if (!has(key)) {
    missing(command_, key);
  }
  const auto& v = values_.at(key);
  if (!v.is_string()) {
    throw ConfigError(fmt::format("{}: setting '{}' must be a string", command_, key));
  }
  return v.get<std::string>();
}

std::optional<std::string> Settings::maybe_text(const std::string& key) const {
  if (!has(key)) {
    return std::nullopt;
  }
  return get_text(key);
}

fs::path Settings::get_path(const std::string& key) const { return get_text(key); }

std::optional<fs::path> Settings::maybe_path(const std::string& key) const {
  if (!has(key)) {
    return std::nullopt;
  }
  return get_path(key);
}

std::vector<fs::path> Settings::get_paths(const std::string& key) const {
  std::vector<fs::path> out;
  if (!has(key)) {
    return out;
  }
  for (const auto& p : values_.at(key)) {
    out.emplace_back(p.get<std::string>());
  }
  return out;
}

std::vector<double> Settings::get_numbers(const std::string& key) const {
  std::vector<double> out;
  if (!has(key)) {
    return out;
  }
  for (const auto& v : values_.at(key)) {
    out.push_back(v.get<double>());
  }
  return out;
}

std::string Settings::digest() const {
  // Inputs enter by content, so the digest does not depend on where files live.
  auto v = values_;
  v.erase("output_dir");
  v.erase("output");
  auto content = [](const nlohmann::json& p) -> nlohmann::json {
    const fs::path file(p.get<std::string>());
    std::error_code ec;
    return fs::is_regular_file(file, ec) ? file_sha256(file) : file.filename().string();
  };
  for (const auto& [key, entry] : entries_) {
    if (!v.contains(key) || v.at(key).is_null()) {
      continue;
    }
    if (entry.kind == Kind::path) {
      v[key] = content(v.at(key));
    } else if (entry.kind == Kind::paths) {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& p : v.at(key)) {
        list.push_back(content(p));
      }
      v[key] = list;
    }
  }
  if (!section_.empty()) {
    v["section"] = section_;
  }
  return sha256_hex(v.dump());
}

fs::path Settings::output_path(const std::string& name) const {
  const fs::path dir = get_text("output_dir");
  const fs::path p(name);
  const fs::path out = p.is_absolute() ? p : dir / p;
  if (out.has_parent_path()) {
    fs::create_directories(out.parent_path());
  }
  return out;
}

}  // namespace jjspd::cli
