#pragma once

#include <stdexcept>
#include <string>

namespace jjspd {

// Process exit codes used by the command-line tool.
enum class ErrorCategory : int {
  config = 2,
  data = 3,
  numeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Malformed or incomplete configuration (missing fields, bad values).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

/// Input data that is missing, unreadable or unusable for the requested step.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorCategory::data, what) {}
};

/// Arguments outside the mathematical domain of a formula.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::numeric, what) {}
};

/// A root/inverse problem with no solution in the admissible range.
class NoSolutionError : public Error {
 public:
  explicit NoSolutionError(const std::string& what) : Error(ErrorCategory::numeric, what) {}
};

/// Not enough data for the requested statistic.
class StatisticsError : public Error {
 public:
  explicit StatisticsError(const std::string& what) : Error(ErrorCategory::data, what) {}
};

namespace detail {
inline void require_positive(double value, const char* name) {
  if (!(value > 0.0)) {
    throw DomainError(std::string(name) + " must be positive, got " + std::to_string(value));
  }
}
inline void require_non_negative(double value, const char* name) {
  if (!(value >= 0.0)) {
    throw DomainError(std::string(name) + " must be non-negative, got " + std::to_string(value));
  }
}
}  // namespace detail

}  // namespace jjspd
