#pragma once

#include <optional>
#include <vector>

#include "insitu/sim/motion.hpp"

namespace insitu::sim {

struct PlannerConfig {
    double cell = 0.1;        ///< grid resolution, m
    double clearance = 0.15;  ///< obstacle inflation for the grid search
    double goal_radius = 0.9; ///< stop this close to the target footprint
    int max_steps = 10;       ///< plans longer than this are rejected
    MotionConfig motion;
};

/// Yaw in degrees that faces `p` from `from` in the horizontal plane.
double yaw_towards(Vec3 from, Vec3 p) noexcept;

/// True when the straight segment from `eye` to `p` meets no entity other
/// than `target` (and no other entity's box strictly before `p`).
bool line_of_sight(const Scene& scene, Vec3 eye, Vec3 p, const SceneEntity* target) noexcept;

/**
 * Shortest grid path (8-connected A* on an inflated occupancy grid) to a
 * cell within `goal_radius` of the target's footprint with line of sight to
 * it, string-pulled into straight legs and cut into actions of at most
 * max_step metres. A final turn-only action faces the target centre.
 * Returns nullopt when no such plan fits in `max_steps` actions.
 */
std::optional<std::vector<Action>> plan_to_target(const Scene& scene, const AgentPose& start, const SceneEntity& target,
                                                  const PlannerConfig& config = {});

/// Applies actions with `step`; returns every intermediate pose (size n + 1).
std::vector<AgentPose> simulate(const Scene& scene, const AgentPose& start, const std::vector<Action>& actions,
                                const MotionConfig& motion = {});

} // namespace insitu::sim
