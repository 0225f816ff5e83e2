#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "jjspd/junction.hpp"

namespace jjspd::test {

inline std::filesystem::path data_dir() { return JJSPD_DATA_DIR; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("jjspd_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::abs(b);
}

// Device A at I_c = 11.99 uA, C = 18 fF, R_n = 44 Ohm.
inline JunctionParams device_a() {
  return make_junction(11.99e-6, 44.0, 18e-15, 1.52e-3 * 1.602176634e-19, 0.027);
}

}  // namespace jjspd::test
