#include "jjspd/table_io.hpp"

#include <charconv>
#include <limits>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "jjspd/error.hpp"

namespace jjspd {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_double(const std::string& text) {
  if (text == "nan" || text == "NaN") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (text == "inf" || text == "Inf") {
    return std::numeric_limits<double>::infinity();
  }
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

void Metadata::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void Metadata::set(std::string key, double value) { set(std::move(key), format_number(value)); }

void Metadata::set(std::string key, std::int64_t value) { set(std::move(key), std::to_string(value)); }

void Metadata::set(std::string key, std::uint64_t value) { set(std::move(key), std::to_string(value)); }

std::optional<std::string> Metadata::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) {
      return v;
    }
  }
  return std::nullopt;
}

std::optional<double> Metadata::get_number(std::string_view key) const {
  const auto text = get(key);
  if (!text) {
    return std::nullopt;
  }
  return parse_double(*text);
}

void Metadata::merge(const Metadata& other) {
  for (const auto& [k, v] : other.entries_) {
    if (!contains(k)) {
      entries_.emplace_back(k, v);
    }
  }
}

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

ColumnTable::ColumnTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

bool ColumnTable::has_column(std::string_view name) const {
  for (const auto& c : columns_) {
    if (c == name) {
      return true;
    }
  }
  return false;
}

std::size_t ColumnTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == name) {
      return i;
    }
  }
  throw DataError(fmt::format("table has no column '{}'", name));
}

void ColumnTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) {
    throw DataError(fmt::format("row has {} cells, table has {} columns", cells.size(), columns_.size()));
  }
  rows_.push_back(std::move(cells));
}

void ColumnTable::add_row(std::span<const double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) {
    cells.push_back(format_number(v));
  }
  add_row(std::move(cells));
}

std::vector<double> ColumnTable::numeric_column(std::string_view name) const {
  const auto index = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto value = parse_double(rows_[r][index]);
    if (!value) {
      throw DataError(fmt::format("column '{}' row {}: '{}' is not a number", name, r + 1, rows_[r][index]));
    }
    out.push_back(*value);
  }
  return out;
}

std::vector<std::string> ColumnTable::text_column(std::string_view name) const {
  const auto index = column_index(name);
  std::vector<std::string> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) {
    out.push_back(row[index]);
  }
  return out;
}

void ColumnTable::write(std::ostream& out) const {
  for (const auto& [k, v] : metadata_.entries()) {
    out << "# " << k << ": " << v << '\n';
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out << (i ? "," : "") << columns_[i];
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << row[i];
    }
    out << '\n';
  }
}

void ColumnTable::write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open " + path.string() + " for writing");
  }
  write(out);
}

ColumnTable ColumnTable::read(std::istream& in, const std::string& source) {
  ColumnTable table;
  std::string line;
  bool have_header = false;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto text = trim(line);
    if (text.empty()) {
      continue;
    }
    if (text.front() == '#') {
      const auto body = trim(std::string_view(text).substr(1));
      const auto colon = body.find(':');
      if (colon != std::string::npos) {
        table.metadata_.set(trim(std::string_view(body).substr(0, colon)),
                            trim(std::string_view(body).substr(colon + 1)));
      }
      continue;
    }
    auto cells = split_csv(text);
    if (!have_header) {
      table.columns_ = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.columns_.size()) {
      throw DataError(fmt::format("{}:{}: expected {} cells, found {}", source, line_number,
                                  table.columns_.size(), cells.size()));
    }
    table.rows_.push_back(std::move(cells));
  }
  if (!have_header) {
    throw DataError(source + ": no column header found");
  }
  return table;
}

ColumnTable ColumnTable::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  return read(in, path.string());
}

void write_single_column(const std::filesystem::path& path, std::string_view name,
                         std::span<const double> values, const Metadata& metadata) {
  ColumnTable table({std::string(name)});
  table.metadata() = metadata;
  for (double v : values) {
    table.add_row(std::span<const double>(&v, 1));
  }
  table.write(path);
}

}  // namespace jjspd
