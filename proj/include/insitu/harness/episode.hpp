#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "insitu/core/io.hpp"
#include "insitu/harness/solver.hpp"
#include "insitu/sim/motion.hpp"

namespace insitu::harness {

enum class NavEvent : unsigned {
    none = 0,
    moved_away_after_seen = 1u << 0,
    early_termination = 1u << 1,
    chased_reflection = 1u << 2,
};
constexpr NavEvent operator|(NavEvent a, NavEvent b) noexcept
{
    return static_cast<NavEvent>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr bool has(NavEvent set, NavEvent e) noexcept { return (static_cast<unsigned>(set) & static_cast<unsigned>(e)) != 0; }

/// Per-pose facts an episode is scored on. Entry 0 is the start pose.
struct TrajectoryPoint {
    sim::AgentPose pose;
    std::optional<sim::Action> action; ///< action that led here; empty at the start
    std::string record_id;
    double distance = 0.0;       ///< horizontal distance to the target footprint
    bool target_visible = false; ///< directly visible
    bool reflection_visible = false;
    friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

struct NavEpisode {
    std::string task_ref;
    std::string target_id;
    std::vector<TrajectoryPoint> trajectory;
    double d0 = 0.0;
    double dT = 0.0;
    int steps = 0;
    bool success = false;
    std::optional<int> first_seen_step;
    NavEvent events = NavEvent::none;
    bool terminated = false; ///< the solver asked to stop
    std::string error;       ///< solver error that ended the episode, if any
    friend bool operator==(const NavEpisode&, const NavEpisode&) = default;
};

struct EpisodeConfig {
    sim::MotionConfig motion;
    /// Neglect fires when distance grows on more than this share of the
    /// steps after the target was first seen.
    double neglect_majority = 0.5;
};

struct EpisodeOutput {
    NavEpisode episode;
    std::vector<sim::ObservationRecord> observations; ///< one per trajectory point
};

/**
 * Runs one navigation instance from its pose for at most nav_goal.max_steps
 * actions. Forward distances are clamped to the motion step limit. Record
 * timestamps start at `first_timestamp`. Solver errors end the episode as a
 * failure at the current step and are kept in `error`.
 */
EpisodeOutput run_episode(const sim::Scene& scene, const task::TaskInstance& inst, Solver& solver,
                          std::uint64_t first_timestamp = 0, const EpisodeConfig& config = {});

/// Recomputes success, steps, distances and events from a stored trajectory;
/// chased_reflection is kept as recorded.
void classify_episode(NavEpisode& ep, double success_radius, const EpisodeConfig& config = {});

/// Mirror images of the target centre, one per mirror in the scene.
std::vector<Vec3> reflection_points(const sim::Scene& scene, const sim::SceneEntity& target);

void to_json(json& j, const NavEpisode& e);
void from_json(const json& j, NavEpisode& e);

} // namespace insitu::harness
