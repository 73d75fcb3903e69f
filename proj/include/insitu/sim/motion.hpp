#pragma once

#include "insitu/core/rng.hpp"
#include "insitu/sim/scene.hpp"

namespace insitu::sim {

struct Action {
    double turn_deg = 0.0;
    double forward_m = 0.0;

    friend bool operator==(const Action&, const Action&) = default;
};

struct MotionConfig {
    double max_step = 1.0;
    double skin = 0.01;  ///< clearance kept from whatever stopped the motion
    double min_walk = 0.2;
};

/// Distance along the horizontal unit direction `dir` before the floor point
/// enters a solid footprint or leaves the room; +inf if never.
double distance_to_obstacle(const Scene& scene, const AgentPose& pose, Vec3 dir) noexcept;

/**
 * Turns, then moves along the new heading. Motion stops `skin` short of the
 * first solid footprint or wall; collisions truncate rather than fail.
 * Throws Errc::precondition when |forward| exceeds the max step.
 */
AgentPose step(const Scene& scene, const AgentPose& pose, const Action& action, const MotionConfig& config = {});

struct WalkStep {
    Action action;
    AgentPose pose;
};

/// One random-walk step: heading uniform in [0, 360), distance uniform in
/// [min_walk, max_step].
WalkStep random_walk(const Scene& scene, const AgentPose& pose, Rng& rng, const MotionConfig& config = {});

} // namespace insitu::sim
