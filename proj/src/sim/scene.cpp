#include "insitu/sim/scene.hpp"

#include <algorithm>
#include <set>

namespace insitu::sim {

const SceneEntity* Scene::find(std::string_view entity_id) const noexcept
{
    auto it = std::find_if(entities.begin(), entities.end(), [&](const SceneEntity& e) { return e.id == entity_id; });
    return it == entities.end() ? nullptr : &*it;
}

std::uint32_t Scene::instance_of(std::string_view entity_id) const noexcept
{
    for (std::size_t i = 0; i < entities.size(); ++i) {
        if (entities[i].id == entity_id) return static_cast<std::uint32_t>(i + 1);
    }
    return 0;
}

const SceneEntity* Scene::by_instance(std::uint32_t instance) const noexcept
{
    if (instance == 0 || instance > entities.size()) return nullptr;
    return &entities[instance - 1];
}

bool Scene::has_mirror() const noexcept
{
    return std::any_of(entities.begin(), entities.end(), [](const SceneEntity& e) { return e.is_mirror; });
}

bool is_solid_for(const SceneEntity& e, const AgentPose& pose) noexcept
{
    return e.bbox3d.min.z < pose.position.z + pose.camera.eye_height && e.bbox3d.max.z > pose.position.z;
}

bool pose_intersects(const Scene& scene, const AgentPose& pose) noexcept
{
    const Vec3 p = pose.position;
    const Aabb& b = scene.bounds;
    if (p.x <= b.min.x || p.x >= b.max.x || p.y <= b.min.y || p.y >= b.max.y) {
        return true;
    }
    for (const auto& e : scene.entities) {
        if (!is_solid_for(e, pose)) continue;
        const Aabb& box = e.bbox3d;
        if (p.x > box.min.x && p.x < box.max.x && p.y > box.min.y && p.y < box.max.y) {
            return true;
        }
    }
    return false;
}

namespace {

bool on_face(const Aabb& box, const MirrorPlane& m)
{
    for (int axis = 0; axis < 3; ++axis) {
        const double n = m.normal[axis];
        if (n == 0.0) continue;
        const double face = n > 0 ? box.max[axis] : box.min[axis];
        if (std::abs(m.center[axis] - face) > 1e-9) return false;
        for (int other = 0; other < 3; ++other) {
            if (other == axis) continue;
            const double reach = std::abs(m.u_axis[other]) * m.half_u + std::abs(m.v_axis[other]) * m.half_v;
            if (m.center[other] - reach < box.min[other] - 1e-9 || m.center[other] + reach > box.max[other] + 1e-9) {
                return false;
            }
        }
        return true;
    }
    return false;
}

} // namespace

std::vector<std::string> validate_scene(const Scene& scene)
{
    std::vector<std::string> issues;
    if (!scene.bounds.valid()) issues.push_back("scene bounds inverted");
    std::set<std::string> ids;
    for (const auto& e : scene.entities) {
        if (!ids.insert(e.id).second) issues.push_back("duplicate entity id " + e.id);
        if (!e.bbox3d.valid()) issues.push_back(e.id + ": bbox inverted");
        if (!e.bbox3d.contains(e.position)) issues.push_back(e.id + ": position outside bbox");
        if (!scene.bounds.contains(e.bbox3d)) issues.push_back(e.id + ": bbox outside scene bounds");
        if (e.is_mirror != e.mirror_plane.has_value()) issues.push_back(e.id + ": mirror flag/plane mismatch");
        if (e.mirror_plane && !on_face(e.bbox3d, *e.mirror_plane)) issues.push_back(e.id + ": mirror not on a bbox face");
    }
    for (const AgentPose* pose : {&scene.agent_spawn, &scene.surveillance_pose}) {
        if (!camera_valid(pose->camera)) issues.push_back("invalid camera");
        if (!scene.bounds.contains(pose->eye())) issues.push_back("camera eye outside bounds");
    }
    if (pose_intersects(scene, scene.agent_spawn)) issues.push_back("agent spawn inside a solid entity");
    return issues;
}

} // namespace insitu::sim
