#include "insitu/sim/motion.hpp"

#include <cmath>
#include <limits>

#include "insitu/core/error.hpp"

namespace insitu::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Entry distance of the 2D ray p + t*d into the rectangle [lo, hi]; +inf if missed.
double enter_rect(double px, double py, double dx, double dy, double x0, double y0, double x1, double y1) noexcept
{
    double t0 = -kInf;
    double t1 = kInf;
    const double p[2] = {px, py};
    const double d[2] = {dx, dy};
    const double lo[2] = {x0, y0};
    const double hi[2] = {x1, y1};
    for (int a = 0; a < 2; ++a) {
        if (d[a] == 0.0) {
            if (p[a] <= lo[a] || p[a] >= hi[a]) return kInf;
            continue;
        }
        double ta = (lo[a] - p[a]) / d[a];
        double tb = (hi[a] - p[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (t0 >= t1 || t1 <= 0.0) return kInf;
    return std::max(t0, 0.0);
}

/// Exit distance from the room rectangle.
double exit_rect(double px, double py, double dx, double dy, const Aabb& b) noexcept
{
    double t = kInf;
    if (dx > 0) t = std::min(t, (b.max.x - px) / dx);
    if (dx < 0) t = std::min(t, (b.min.x - px) / dx);
    if (dy > 0) t = std::min(t, (b.max.y - py) / dy);
    if (dy < 0) t = std::min(t, (b.min.y - py) / dy);
    return std::max(t, 0.0);
}

} // namespace

double distance_to_obstacle(const Scene& scene, const AgentPose& pose, Vec3 dir) noexcept
{
    const Vec3 p = pose.position;
    double t = exit_rect(p.x, p.y, dir.x, dir.y, scene.bounds);
    for (const auto& e : scene.entities) {
        if (!is_solid_for(e, pose)) continue;
        const Aabb& b = e.bbox3d;
        t = std::min(t, enter_rect(p.x, p.y, dir.x, dir.y, b.min.x, b.min.y, b.max.x, b.max.y));
    }
    return t;
}

AgentPose step(const Scene& scene, const AgentPose& pose, const Action& action, const MotionConfig& config)
{
    require(std::abs(action.forward_m) <= config.max_step + 1e-12, "forward distance exceeds max step");
    AgentPose next = pose;
    next.yaw_deg = wrap_degrees(pose.yaw_deg + action.turn_deg);
    const double distance = std::abs(action.forward_m);
    if (distance == 0.0) {
        return next;
    }
    const double yaw = deg_to_rad(next.yaw_deg);
    const double sign = action.forward_m < 0.0 ? -1.0 : 1.0;
    const Vec3 dir{sign * std::cos(yaw), sign * std::sin(yaw), 0.0};
    const double free = distance_to_obstacle(scene, next, dir);
    const double travel = distance <= free - config.skin ? distance : std::max(0.0, free - config.skin);
    next.position = pose.position + dir * travel;
    return next;
}

WalkStep random_walk(const Scene& scene, const AgentPose& pose, Rng& rng, const MotionConfig& config)
{
    require(config.max_step >= config.min_walk, "max step below minimum walk distance");
    const double heading = rng.uniform(0.0, 360.0);
    const double forward = rng.uniform(config.min_walk, config.max_step);
    double turn = wrap_degrees(heading - pose.yaw_deg);
    if (turn > 180.0) turn -= 360.0;
    Action action{turn, forward};
    return {action, step(scene, pose, action, config)};
}

} // namespace insitu::sim
