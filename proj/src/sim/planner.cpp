#include "insitu/sim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace insitu::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double signed_turn(double from_deg, double to_deg) noexcept
{
    double d = wrap_degrees(to_deg - from_deg);
    if (d > 180.0) d -= 360.0;
    return d;
}

/// Sample points on the target box: centre, face centres, corners pulled inward.
std::vector<Vec3> target_samples(const Aabb& b)
{
    const Vec3 c = b.center();
    const Vec3 h = b.extent() * 0.5;
    std::vector<Vec3> pts{c};
    for (int axis = 0; axis < 3; ++axis) {
        for (double s : {-0.98, 0.98}) {
            Vec3 p = c;
            p.at(axis) += s * h[axis];
            pts.push_back(p);
        }
    }
    for (double sx : {-0.95, 0.95}) {
        for (double sy : {-0.95, 0.95}) {
            for (double sz : {-0.95, 0.95}) {
                pts.push_back({c.x + sx * h.x, c.y + sy * h.y, c.z + sz * h.z});
            }
        }
    }
    return pts;
}

/// Whether a camera at `pos` turned toward the target would see some sample point.
bool sees_target(const Scene& scene, const AgentPose& proto, Vec3 pos, const SceneEntity& target,
                 const std::vector<Vec3>& samples)
{
    AgentPose pose = proto;
    pose.position = pos;
    pose.yaw_deg = yaw_towards(pos, target.bbox3d.center());
    const CameraFrame frame = camera_frame(pose);
    for (const Vec3& p : samples) {
        const auto pr = frame.project(p);
        if (pr.depth <= 1e-6) continue;
        if (pr.u < 0.5 || pr.u >= frame.width - 0.5 || pr.v < 0.5 || pr.v >= frame.height - 0.5) continue;
        if (line_of_sight(scene, frame.eye, p, &target)) return true;
    }
    return false;
}

} // namespace

double yaw_towards(Vec3 from, Vec3 p) noexcept
{
    return wrap_degrees(rad_to_deg(std::atan2(p.y - from.y, p.x - from.x)));
}

bool line_of_sight(const Scene& scene, Vec3 eye, Vec3 p, const SceneEntity* target) noexcept
{
    const Vec3 dir = p - eye;
    for (const auto& e : scene.entities) {
        if (&e == target) continue;
        const auto hit = intersect_ray_box(eye, dir, e.bbox3d);
        if (hit && hit->t_near < 1.0 - 1e-9) return false;
    }
    return true;
}

std::vector<AgentPose> simulate(const Scene& scene, const AgentPose& start, const std::vector<Action>& actions,
                                const MotionConfig& motion)
{
    std::vector<AgentPose> poses{start};
    for (const auto& a : actions) {
        poses.push_back(step(scene, poses.back(), a, motion));
    }
    return poses;
}

std::optional<std::vector<Action>> plan_to_target(const Scene& scene, const AgentPose& start, const SceneEntity& target,
                                                  const PlannerConfig& config)
{
    const Aabb& room = scene.bounds;
    const int nx = static_cast<int>(std::floor((room.max.x - room.min.x) / config.cell));
    const int ny = static_cast<int>(std::floor((room.max.y - room.min.y) / config.cell));
    if (nx < 1 || ny < 1) return std::nullopt;

    auto center = [&](int i, int j) {
        return Vec3{room.min.x + (i + 0.5) * config.cell, room.min.y + (j + 0.5) * config.cell, start.position.z};
    };
    std::vector<char> free(static_cast<std::size_t>(nx) * ny, 0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Vec3 c = center(i, j);
            bool ok = c.x - room.min.x >= config.clearance && room.max.x - c.x >= config.clearance &&
                      c.y - room.min.y >= config.clearance && room.max.y - c.y >= config.clearance;
            for (const auto& e : scene.entities) {
                if (!ok) break;
                if (is_solid_for(e, start) && footprint_distance(c, e.bbox3d) < config.clearance) ok = false;
            }
            free[static_cast<std::size_t>(j) * nx + i] = ok;
        }
    }

    const int si = std::clamp(static_cast<int>((start.position.x - room.min.x) / config.cell), 0, nx - 1);
    const int sj = std::clamp(static_cast<int>((start.position.y - room.min.y) / config.cell), 0, ny - 1);
    const auto sidx = static_cast<std::size_t>(sj) * nx + si;
    free[sidx] = 1;

    const std::vector<Vec3> samples = target_samples(target.bbox3d);
    auto heuristic = [&](Vec3 c) { return std::max(0.0, footprint_distance(c, target.bbox3d) - config.goal_radius); };

    std::vector<double> g(free.size(), kInf);
    std::vector<std::ptrdiff_t> parent(free.size(), -1);
    std::vector<char> closed(free.size(), 0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    g[sidx] = 0.0;
    open.push({heuristic(center(si, sj)), sidx});
    std::ptrdiff_t goal = -1;
    while (!open.empty()) {
        const auto [f, idx] = open.top();
        open.pop();
        if (closed[idx]) continue;
        closed[idx] = 1;
        const int i = static_cast<int>(idx % nx);
        const int j = static_cast<int>(idx / nx);
        const Vec3 c = center(i, j);
        if (footprint_distance(c, target.bbox3d) <= config.goal_radius && sees_target(scene, start, c, target, samples)) {
            goal = static_cast<std::ptrdiff_t>(idx);
            break;
        }
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0) continue;
                const int ni = i + di;
                const int nj = j + dj;
                if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
                const auto nidx = static_cast<std::size_t>(nj) * nx + ni;
                if (!free[nidx] || closed[nidx]) continue;
                if (di != 0 && dj != 0 &&
                    (!free[static_cast<std::size_t>(j) * nx + ni] || !free[static_cast<std::size_t>(nj) * nx + i])) {
                    continue;
                }
                const double ng = g[idx] + config.cell * ((di != 0 && dj != 0) ? std::numbers::sqrt2 : 1.0);
                if (ng < g[nidx]) {
                    g[nidx] = ng;
                    parent[nidx] = static_cast<std::ptrdiff_t>(idx);
                    open.push({ng + heuristic(center(ni, nj)), nidx});
                }
            }
        }
    }
    if (goal < 0) return std::nullopt;

    std::vector<Vec3> path;
    for (std::ptrdiff_t at = goal; at >= 0; at = parent[static_cast<std::size_t>(at)]) {
        if (static_cast<std::size_t>(at) == sidx) break;
        path.push_back(center(static_cast<int>(at % nx), static_cast<int>(at / nx)));
    }
    path.push_back(start.position);
    std::reverse(path.begin(), path.end());

    // A leg is usable when `step` would cover it without truncation.
    AgentPose probe = start;
    auto leg_clear = [&](Vec3 a, Vec3 b) {
        const Vec3 d = b - a;
        const double len = std::hypot(d.x, d.y);
        if (len == 0.0) return true;
        probe.position = a;
        return distance_to_obstacle(scene, probe, {d.x / len, d.y / len, 0.0}) >= len + config.motion.skin + 0.02;
    };

    std::vector<Vec3> waypoints{path.front()};
    std::size_t cur = 0;
    while (cur + 1 < path.size()) {
        std::size_t next = cur + 1;
        for (std::size_t k = path.size() - 1; k > cur + 1; --k) {
            if (leg_clear(path[cur], path[k])) {
                next = k;
                break;
            }
        }
        if (!leg_clear(path[cur], path[next])) return std::nullopt;
        waypoints.push_back(path[next]);
        cur = next;
    }

    std::vector<Action> actions;
    double yaw = start.yaw_deg;
    for (std::size_t k = 1; k < waypoints.size(); ++k) {
        const Vec3 a = waypoints[k - 1];
        const Vec3 b = waypoints[k];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (len == 0.0) continue;
        const double heading = yaw_towards(a, b);
        const int pieces = static_cast<int>(std::ceil(len / config.motion.max_step - 1e-9));
        for (int p = 0; p < pieces; ++p) {
            actions.push_back({p == 0 ? signed_turn(yaw, heading) : 0.0, len / pieces});
        }
        yaw = wrap_degrees(yaw + signed_turn(yaw, heading));
    }
    const double face = signed_turn(yaw, yaw_towards(waypoints.back(), target.bbox3d.center()));
    if (std::abs(face) > 1e-9) actions.push_back({face, 0.0});
    if (static_cast<int>(actions.size()) > config.max_steps) return std::nullopt;
    return actions;
}

} // namespace insitu::sim
