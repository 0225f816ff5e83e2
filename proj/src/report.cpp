#include "jjspd/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "jjspd/error.hpp"

namespace jjspd {

namespace {

// JSON has no NaN; uncertainties that are undefined become null.
nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double number_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::string_view version() { return JJSPD_VERSION; }

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw DataError("SHA-256 digest failed");
  }
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += fmt::format("{:02x}", digest[i]);
  }
  return out;
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError(fmt::format("cannot read '{}'", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

Metadata run_metadata(std::string_view command, std::optional<std::uint64_t> seed, std::string_view config_digest) {
  Metadata m;
  m.set("tool", std::string("jjspd"));
  m.set("version", std::string(version()));
  m.set("command", std::string(command));
  if (seed) {
    m.set("seed", *seed);
  } else {
    m.set("seed", std::string("none"));
  }
  m.set("config_sha256", std::string(config_digest));
  return m;
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : fit.parameters) {
    params.push_back({{"name", p.name},
                      {"unit", p.unit},
                      {"value", p.value},
                      {"lower", p.lower},
                      {"upper", p.upper},
                      {"uncertainty", number_or_null(p.uncertainty)},
                      {"at_bound", p.at_bound}});
  }
  nlohmann::json diagnostics = nlohmann::json::object();
  for (const auto& [k, v] : fit.diagnostics) {
    diagnostics[k] = number_or_null(v);
  }
  nlohmann::json residuals = nlohmann::json::array();
  for (double r : fit.residuals) {
    residuals.push_back(number_or_null(r));
  }
  return {{"kind", fit.kind},
          {"parameters", params},
          {"chi_square", number_or_null(fit.chi_square)},
          {"reduced_chi_square", number_or_null(fit.reduced_chi_square)},
          {"points", fit.points},
          {"dof", fit.dof},
          {"converged", fit.converged},
          {"iterations", fit.iterations},
          {"evaluations", fit.evaluations},
          {"condition", number_or_null(fit.condition)},
          {"flags", fit.flags},
          {"diagnostics", diagnostics},
          {"residuals", residuals}};
}

FitResult fit_result_from_json(const nlohmann::json& j) {
  try {
    FitResult fit;
    fit.kind = j.at("kind").get<std::string>();
    for (const auto& p : j.at("parameters")) {
      fit.parameters.push_back({p.at("name").get<std::string>(), p.value("unit", ""), p.at("value").get<double>(),
                                p.at("lower").get<double>(), p.at("upper").get<double>(),
                                number_from(p.at("uncertainty")), p.value("at_bound", false)});
    }
    fit.chi_square = number_from(j.at("chi_square"));
    fit.reduced_chi_square = number_from(j.at("reduced_chi_square"));
    fit.points = j.value("points", std::size_t{0});
    fit.dof = j.value("dof", std::size_t{0});
    fit.converged = j.value("converged", false);
    fit.iterations = j.value("iterations", 0);
    fit.evaluations = j.value("evaluations", 0);
    fit.flags = j.value("flags", std::vector<std::string>{});
    for (const auto& v : j.value("residuals", nlohmann::json::array())) {
      fit.residuals.push_back(number_from(v));
    }
    for (const auto& v : j.value("history", nlohmann::json::array())) {
      fit.history.push_back(number_from(v));
    }
    if (j.contains("diagnostics")) {
      for (const auto& [k, v] : j.at("diagnostics").items()) {
        fit.diagnostics.emplace_back(k, number_from(v));
      }
    }
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("malformed fit report: {}", e.what()));
  }
}

nlohmann::json to_json(const HeatingCorrection& h) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < h.power.size(); ++i) {
    rows.push_back({{"power_W", h.power[i]},
                    {"factor", h.factor[i]},
                    {"raw_factor", h.raw_factor[i]},
                    {"uncertainty", number_or_null(h.uncertainty[i])}});
  }
  return {{"kind", "heating"}, {"corrections", rows}, {"flags", h.flags}, {"out_of_model", h.out_of_model}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError(fmt::format("cannot write '{}'", path.string()));
  }
  out << doc.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError(fmt::format("cannot read '{}'", path.string()));
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

}  // namespace jjspd
