#include "insitu/core/io.hpp"

#include <fstream>
#include <sstream>

#include "insitu/core/error.hpp"

namespace insitu {

json schema_header(std::string_view schema, int version)
{
    return json{{"schema", schema}, {"schema_version", version}};
}

void check_schema(const json& j, std::string_view schema, int version)
{
    if (!j.is_object() || !j.contains("schema") || !j.contains("schema_version")) {
        throw Error(Errc::schema_version, "missing schema header (expected " + std::string(schema) + ")");
    }
    const auto name = j.at("schema").get<std::string>();
    const auto v = j.at("schema_version").get<int>();
    if (name != schema || v != version) {
        throw Error(Errc::schema_version, "unsupported schema " + name + " v" + std::to_string(v) + " (expected " +
                                              std::string(schema) + " v" + std::to_string(version) + ")");
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::io, "write failed for " + path.string());
}

json read_json(const std::filesystem::path& path)
{
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(Errc::io, path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

void to_json(json& j, const Vec3& v) { j = json::array({v.x, v.y, v.z}); }
void from_json(const json& j, Vec3& v)
{
    v = {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

void to_json(json& j, const Aabb& b) { j = json{{"min", b.min}, {"max", b.max}}; }
void from_json(const json& j, Aabb& b)
{
    b.min = j.at("min").get<Vec3>();
    b.max = j.at("max").get<Vec3>();
}

void to_json(json& j, const PixelBox& b) { j = json::array({b.u0, b.v0, b.u1, b.v1}); }
void from_json(const json& j, PixelBox& b)
{
    b = {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}

} // namespace insitu
