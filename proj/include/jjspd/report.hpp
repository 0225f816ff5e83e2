#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "jjspd/fit.hpp"
#include "jjspd/table_io.hpp"

namespace jjspd {

std::string_view version();

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

/// Header shared by every output: tool, version, command, seed, config digest.
Metadata run_metadata(std::string_view command, std::optional<std::uint64_t> seed, std::string_view config_digest);

nlohmann::json to_json(const FitResult& fit);
FitResult fit_result_from_json(const nlohmann::json& j);

nlohmann::json to_json(const HeatingCorrection& h);

/// Writes `doc` with sorted keys and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace jjspd
