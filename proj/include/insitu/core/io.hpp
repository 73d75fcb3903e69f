#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "insitu/core/geometry.hpp"

namespace insitu {

using json = nlohmann::json;

/// {"schema": name, "schema_version": version}
json schema_header(std::string_view schema, int version);

/// Throws Errc::schema_version unless `j` carries exactly this schema name
/// and version.
void check_schema(const json& j, std::string_view schema, int version);

/// Throw Errc::io on failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

void to_json(json& j, const Vec3& v);
void from_json(const json& j, Vec3& v);
void to_json(json& j, const Aabb& b);
void from_json(const json& j, Aabb& b);
void to_json(json& j, const PixelBox& b);
void from_json(const json& j, PixelBox& b);

} // namespace insitu
