#pragma once

#include <string>

#include "insitu/sim/render.hpp"
#include "insitu/sim/scene.hpp"
#include "insitu/task/templates.hpp"

namespace fixtures {

using namespace insitu;

inline sim::SceneEntity box(std::string id, std::string label, Aabb b, std::string color = "red")
{
    sim::SceneEntity e;
    e.id = std::move(id);
    e.label = std::move(label);
    e.color = std::move(color);
    e.bbox3d = b;
    e.position = b.center();
    return e;
}

inline sim::Scene room(double x = 10, double y = 10, double z = 3)
{
    sim::Scene s;
    s.id = "room";
    s.bounds = {{0, 0, 0}, {x, y, z}};
    s.agent_spawn.position = {1, 5, 0};
    s.surveillance_pose.position = {0.3, 0.3, 0};
    s.surveillance_pose.camera.eye_height = 2.7;
    return s;
}

inline sim::AgentPose pose(Vec3 p, double yaw = 0, double pitch = 0)
{
    sim::AgentPose a;
    a.position = p;
    a.yaw_deg = yaw;
    a.pitch_deg = pitch;
    return a;
}

/// Agent at (1, 5) looking +x, level, at a table 3 m ahead with a cup on it
/// and a chair off to the left.
inline sim::Scene table_scene()
{
    sim::Scene s = room();
    s.agent_spawn = pose({1, 5, 0});
    s.entities.push_back(box("table_01", "table", {{3.5, 4.4, 0}, {4.5, 5.6, 0.75}}, "brown"));
    s.entities.push_back(box("cup_01", "cup", {{3.9, 4.9, 0.75}, {4.1, 5.1, 0.9}}, "white"));
    s.entities.push_back(box("chair_01", "chair", {{3.6, 6.4, 0}, {4.2, 7.0, 1.0}}, "red"));
    return s;
}

inline sim::ObservationRecord spawn_view(const sim::Scene& s, std::uint64_t ts = 0)
{
    return sim::render(s, s.agent_spawn, sim::View::ego, ts);
}

} // namespace fixtures
