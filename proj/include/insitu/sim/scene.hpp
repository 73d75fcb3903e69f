#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "insitu/core/geometry.hpp"
#include "insitu/sim/camera.hpp"

namespace insitu::sim {

/// Reflective rectangle lying on one face of a mirror entity's box.
struct MirrorPlane {
    Vec3 center;
    Vec3 normal; ///< unit, axis-aligned, pointing into the room
    Vec3 u_axis;
    Vec3 v_axis;
    double half_u = 0.0;
    double half_v = 0.0;

    bool contains(Vec3 p, double tol = 1e-9) const noexcept
    {
        const Vec3 d = p - center;
        return std::abs(dot(d, normal)) <= 1e-6 && std::abs(dot(d, u_axis)) <= half_u + tol &&
               std::abs(dot(d, v_axis)) <= half_v + tol;
    }

    friend bool operator==(const MirrorPlane&, const MirrorPlane&) = default;
};

struct SceneEntity {
    std::string id;
    std::string label;
    std::string color;
    Vec3 position; ///< box center
    Aabb bbox3d;
    bool is_mirror = false;
    std::optional<MirrorPlane> mirror_plane;

    /// "red chair"
    std::string description() const { return color + " " + label; }
    friend bool operator==(const SceneEntity&, const SceneEntity&) = default;
};

/// Room of labeled boxes. Right-handed, Z up, meters.
struct Scene {
    std::string id;
    std::vector<SceneEntity> entities;
    Aabb bounds;
    AgentPose agent_spawn;
    AgentPose surveillance_pose;

    const SceneEntity* find(std::string_view entity_id) const noexcept;
    /// Instance-buffer id of an entity: its index + 1; 0 when absent.
    std::uint32_t instance_of(std::string_view entity_id) const noexcept;
    const SceneEntity* by_instance(std::uint32_t instance) const noexcept;
    bool has_mirror() const noexcept;

    friend bool operator==(const Scene&, const Scene&) = default;
};

/// Entities the agent's body (floor point up to eye height) collides with.
bool is_solid_for(const SceneEntity& e, const AgentPose& pose) noexcept;

/// True if the pose's floor point lies strictly inside a solid footprint or
/// outside the room.
bool pose_intersects(const Scene& scene, const AgentPose& pose) noexcept;

/// Human-readable violations of the scene invariants; empty when valid.
std::vector<std::string> validate_scene(const Scene& scene);

} // namespace insitu::sim
