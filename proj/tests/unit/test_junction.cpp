#include <doctest.h>

#include <map>
#include <nlohmann/json.hpp>

#include "jjspd/constants.hpp"
#include "jjspd/device_io.hpp"
#include "jjspd/error.hpp"
#include "support.hpp"

using namespace jjspd;
using jjspd::test::rel_close;

namespace {

struct Listed {
  double density, mobility, mfp, ic, rn, thouless, ej, f0, c, q0;
};

// Listed device values; the cells in outlier() do not follow from their own row.
const std::map<std::string, Listed> listed = {
    {"A", {1.99e12, 5588, 91.7, 11.99, 44, 0.76, 25, 225, 18, 1.12}},
    {"B", {1.98e12, 7740, 121, 11.47, 40, 0.74, 24, 200, 22, 1.22}},
    {"C", {1.89e12, 7739, 124, 3.78, 71, 1.6, 7.8, 500, 5.8, 1.67}},
    {"D", {1.67e12, 8000, 120, 3.54, 63, 0.99, 7.25, 156, 11, 0.46}},
};

bool outlier(const std::string& device, const std::string& cell) {
  static const std::multimap<std::string, std::string> known = {
      {"B", "thouless"}, {"C", "thouless"}, {"C", "f0"}, {"C", "q0"}, {"D", "q0"}};
  auto [lo, hi] = known.equal_range(device);
  for (auto it = lo; it != hi; ++it) {
    if (it->second == cell) return true;
  }
  return false;
}

void check_cell(const std::string& device, const std::string& cell, double derived, double table) {
  INFO(device << " " << cell << ": derived " << derived << ", listed " << table);
  if (outlier(device, cell)) {
    CHECK_FALSE(rel_close(derived, table, 0.15));
  } else {
    CHECK(rel_close(derived, table, 0.10));
  }
}

}  // namespace

TEST_SUITE("junction") {

TEST_CASE("device A golden values") {
  const auto j = test::device_a();
  CHECK(j.plasma_frequency == doctest::Approx(1.422674192077e12).epsilon(1e-10));
  CHECK(j.quality_factor == doctest::Approx(1.12675796).epsilon(1e-8));
  CHECK(j.josephson_energy / units::meV == doctest::Approx(24.628874).epsilon(1e-7));
  CHECK(rel_close(j.plasma_frequency / (2 * constants::pi) / units::GHz, 225, 0.03));
  CHECK(rel_close(j.quality_factor, 1.12, 0.03));
  CHECK(rel_close(j.josephson_energy / units::meV, 25, 0.03));
}

TEST_CASE("each derivation step against the listed device values") {
  for (const auto& [name, row] : listed) {
    const double l = derive_mean_free_path(row.density * units::per_cm2, row.mobility * units::cm2_per_Vs);
    if (name == "B") {
      // 127 nm from its own density and mobility; listed as 121.
      CHECK(rel_close(l / units::nm, row.mfp, 0.06));
    } else {
      check_cell(name, "mfp", l / units::nm, row.mfp);
    }
    const auto dt = derive_diffusion_and_thouless(row.mfp * units::nm, 1e6, 200 * units::nm);
    check_cell(name, "thouless", dt.thouless_energy / units::meV, row.thouless);
    const auto pq = derive_plasma_and_quality(row.ic * units::uA, row.c * units::fF, row.rn);
    check_cell(name, "f0", pq.plasma_frequency / (2 * constants::pi) / units::GHz, row.f0);
    check_cell(name, "q0", pq.quality_factor, row.q0);
    check_cell(name, "ej", pq.josephson_energy / units::meV, row.ej);
    const double c = derive_capacitance(row.rn, row.thouless * units::meV);
    check_cell(name, "c", c / units::fF, row.c);
  }
}

TEST_CASE("derive_junction from the shipped device file") {
  const auto devices = load_devices(test::data_dir() / "devices.json");
  REQUIRE(devices.size() == 4);
  CHECK(devices[0].name == "A");
  CHECK(devices[3].name == "D");
  const auto a = derive_junction(devices[0]);
  CHECK(a.capacitance_overridden);
  CHECK(a.params.capacitance == doctest::Approx(18e-15));
  CHECK(a.thouless_capacitance / units::fF == doctest::Approx(19.7).epsilon(0.01));
  CHECK(a.params.mean_free_path / units::nm == doctest::Approx(91.97).epsilon(0.005));
}

TEST_CASE("with_critical_current rescales dependent quantities") {
  const auto j = test::device_a();
  const auto k = with_critical_current(j, 4 * j.critical_current);
  CHECK(k.plasma_frequency == doctest::Approx(2 * j.plasma_frequency));
  CHECK(k.quality_factor == doctest::Approx(2 * j.quality_factor));
  CHECK(k.josephson_energy == doctest::Approx(4 * j.josephson_energy));
  CHECK(k.capacitance == j.capacitance);
}

TEST_CASE("device records are validated") {
  CHECK_THROWS_AS(devices_from_json(nlohmann::json::parse(R"({"devices": []})")), ConfigError);
  try {
    devices_from_json(nlohmann::json::parse(R"({"devices": []})"));
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("normal_resistance_ohm") != std::string::npos);
  }
  auto doc = nlohmann::json::parse(R"({"devices": [{"name": "X", "width_um": 1}]})");
  CHECK_THROWS_AS(devices_from_json(doc), ConfigError);
  const auto devices = load_devices(test::data_dir() / "devices.json");
  CHECK_THROWS_AS(find_device(devices, "Z"), ConfigError);
  auto bad = devices[0];
  bad.normal_resistance = -1;
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("junction json round-trip") {
  const auto j = test::device_a();
  const auto k = junction_from_json(to_json(j));
  CHECK(k.critical_current == j.critical_current);
  CHECK(k.plasma_frequency == j.plasma_frequency);
  CHECK(k.quality_factor == j.quality_factor);
}

}
