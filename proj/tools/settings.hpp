#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace jjspd::cli {

/// Options of one leaf command. Values resolve as flag > config file > default;
/// config keys are the flag names without the leading dashes, with '-' -> '_'.
class Settings {
 public:
  Settings(CLI::App& app, std::string command);

  const std::string& command() const { return command_; }

  void number(const std::string& key, std::optional<double> fallback, const std::string& help);
  void integer(const std::string& key, std::optional<std::uint64_t> fallback, const std::string& help);
  void text(const std::string& key, std::optional<std::string> fallback, const std::string& help);
  void path(const std::string& key, std::optional<std::string> fallback, const std::string& help);
  void paths(const std::string& key, const std::string& help);
  /// Like paths(), but accepted as positional arguments too.
  void positional_paths(const std::string& key, const std::string& help);
  void numbers(const std::string& key, const std::string& help);

  /// Merges the config file (if any) and the flags. Must run before reads.
  void resolve();

  bool has(const std::string& key) const;
  double get_number(const std::string& key) const;
  std::optional<double> maybe_number(const std::string& key) const;
  std::uint64_t get_integer(const std::string& key) const;
  std::string get_text(const std::string& key) const;
  std::optional<std::string> maybe_text(const std::string& key) const;
  std::filesystem::path get_path(const std::string& key) const;
  std::optional<std::filesystem::path> maybe_path(const std::string& key) const;
  std::vector<std::filesystem::path> get_paths(const std::string& key) const;
  std::vector<double> get_numbers(const std::string& key) const;

  /// Raw section of the config file for structured entries (e.g. gate lists).
  const nlohmann::json& section() const { return section_; }
  const std::filesystem::path& config_dir() const { return config_dir_; }

  /// Effective configuration, canonical dump; its digest goes in every header.
  nlohmann::json effective() const { return values_; }
  std::string digest() const;

  /// output_dir / name, creating the directory.
  std::filesystem::path output_path(const std::string& name) const;

 private:
  enum class Kind { number, integer, text, path, paths, numbers };
  struct Entry {
    Kind kind;
    CLI::Option* option;
    std::function<nlohmann::json()> flag_value;
  };

  void add(const std::string& key, Kind kind, nlohmann::json fallback, CLI::Option* option,
           std::function<nlohmann::json()> flag_value);
  nlohmann::json resolve_paths(Kind kind, const nlohmann::json& value, const std::filesystem::path& base) const;

  CLI::App& app_;
  std::string command_;
  std::string config_file_;
  std::filesystem::path config_dir_;
  std::vector<std::pair<std::string, Entry>> entries_;
  nlohmann::json values_ = nlohmann::json::object();
  nlohmann::json section_ = nlohmann::json::object();
};

}  // namespace jjspd::cli
