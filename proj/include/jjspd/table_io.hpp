#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace jjspd {

/// Ordered key/value pairs written as `# key: value` header lines.
class Metadata {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, std::int64_t value);
  void set(std::string key, std::uint64_t value);
  void set(std::string key, int value) { set(std::move(key), static_cast<std::int64_t>(value)); }

  std::optional<std::string> get(std::string_view key) const;
  std::optional<double> get_number(std::string_view key) const;
  bool contains(std::string_view key) const { return get(key).has_value(); }

  /// Appends entries of `other` that are not already present.
  void merge(const Metadata& other);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Full-precision text rendering of a double (round-trips exactly).
std::string format_number(double value);

/// Columnar text: `#`-prefixed metadata lines, one comma-separated header
/// line, then rows. Cells are kept as text; numeric accessors parse on
/// demand.
class ColumnTable {
 public:
  ColumnTable() = default;
  explicit ColumnTable(std::vector<std::string> columns);

  Metadata& metadata() { return metadata_; }
  const Metadata& metadata() const { return metadata_; }

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  bool has_column(std::string_view name) const;
  std::size_t column_index(std::string_view name) const;

  void add_row(std::vector<std::string> cells);
  void add_row(std::span<const double> values);

  const std::string& cell(std::size_t row, std::size_t column) const { return rows_[row][column]; }
  std::vector<double> numeric_column(std::string_view name) const;
  std::vector<std::string> text_column(std::string_view name) const;

  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;

  static ColumnTable read(std::istream& in, const std::string& source = "<stream>");
  static ColumnTable read(const std::filesystem::path& path);

 private:
  Metadata metadata_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Single numeric column with header, e.g. counts or switching currents.
void write_single_column(const std::filesystem::path& path, std::string_view name,
                         std::span<const double> values, const Metadata& metadata);

}  // namespace jjspd
