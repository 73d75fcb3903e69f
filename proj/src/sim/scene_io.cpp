#include "insitu/sim/scene_io.hpp"

#include "insitu/core/error.hpp"

namespace insitu::sim {

void to_json(json& j, const Camera& c)
{
    j = json{{"hfov_deg", c.hfov_deg}, {"width", c.width}, {"height", c.height}, {"eye_height", c.eye_height}};
}

void from_json(const json& j, Camera& c)
{
    c.hfov_deg = j.at("hfov_deg").get<double>();
    c.width = j.at("width").get<int>();
    c.height = j.at("height").get<int>();
    c.eye_height = j.at("eye_height").get<double>();
}

void to_json(json& j, const AgentPose& p)
{
    j = json{{"position", p.position}, {"yaw_deg", p.yaw_deg}, {"pitch_deg", p.pitch_deg}, {"camera", p.camera}};
}

void from_json(const json& j, AgentPose& p)
{
    p.position = j.at("position").get<Vec3>();
    p.yaw_deg = j.at("yaw_deg").get<double>();
    p.pitch_deg = j.value("pitch_deg", 0.0);
    p.camera = j.at("camera").get<Camera>();
}

void to_json(json& j, const MirrorPlane& m)
{
    j = json{{"center", m.center}, {"normal", m.normal}, {"u_axis", m.u_axis},
             {"v_axis", m.v_axis}, {"half_u", m.half_u}, {"half_v", m.half_v}};
}

void from_json(const json& j, MirrorPlane& m)
{
    m.center = j.at("center").get<Vec3>();
    m.normal = j.at("normal").get<Vec3>();
    m.u_axis = j.at("u_axis").get<Vec3>();
    m.v_axis = j.at("v_axis").get<Vec3>();
    m.half_u = j.at("half_u").get<double>();
    m.half_v = j.at("half_v").get<double>();
}

void to_json(json& j, const SceneEntity& e)
{
    j = json{{"id", e.id},         {"label", e.label},   {"color", e.color},
             {"position", e.position}, {"bbox3d", e.bbox3d}, {"is_mirror", e.is_mirror}};
    if (e.mirror_plane) j["mirror_plane"] = *e.mirror_plane;
}

void from_json(const json& j, SceneEntity& e)
{
    e.id = j.at("id").get<std::string>();
    e.label = j.at("label").get<std::string>();
    e.color = j.at("color").get<std::string>();
    e.position = j.at("position").get<Vec3>();
    e.bbox3d = j.at("bbox3d").get<Aabb>();
    e.is_mirror = j.at("is_mirror").get<bool>();
    e.mirror_plane.reset();
    if (j.contains("mirror_plane")) e.mirror_plane = j.at("mirror_plane").get<MirrorPlane>();
}

json scene_to_json(const Scene& s)
{
    json j = schema_header(kSceneSchema, kSceneSchemaVersion);
    j["id"] = s.id;
    j["units"] = "m";
    j["bounds"] = s.bounds;
    j["agent_spawn"] = s.agent_spawn;
    j["surveillance_pose"] = s.surveillance_pose;
    j["entities"] = s.entities;
    return j;
}

Scene scene_from_json(const json& j)
{
    check_schema(j, kSceneSchema, kSceneSchemaVersion);
    Scene s;
    try {
        s.id = j.at("id").get<std::string>();
        s.bounds = j.at("bounds").get<Aabb>();
        s.agent_spawn = j.at("agent_spawn").get<AgentPose>();
        s.surveillance_pose = j.at("surveillance_pose").get<AgentPose>();
        s.entities = j.at("entities").get<std::vector<SceneEntity>>();
    } catch (const json::exception& e) {
        throw Error(Errc::io, std::string("malformed scene: ") + e.what());
    }
    const auto issues = validate_scene(s);
    if (!issues.empty()) throw Error(Errc::precondition, "invalid scene " + s.id + ": " + issues.front());
    return s;
}

void save_scene(const std::filesystem::path& path, const Scene& s) { write_json(path, scene_to_json(s)); }

Scene load_scene(const std::filesystem::path& path) { return scene_from_json(read_json(path)); }

} // namespace insitu::sim
