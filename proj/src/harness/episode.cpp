#include "insitu/harness/episode.hpp"

#include <algorithm>

#include "insitu/core/error.hpp"
#include "insitu/sim/scene_io.hpp"

namespace insitu::harness {

std::vector<Vec3> reflection_points(const sim::Scene& scene, const sim::SceneEntity& target)
{
    std::vector<Vec3> out;
    for (const auto& e : scene.entities) {
        if (e.mirror_plane) out.push_back(reflect_point(target.position, e.mirror_plane->center, e.mirror_plane->normal));
    }
    return out;
}

namespace {

double horizontal(Vec3 a, Vec3 b) { return std::hypot(a.x - b.x, a.y - b.y); }

TrajectoryPoint observe(const sim::SceneEntity& target, const sim::ObservationRecord& rec,
                        std::optional<sim::Action> action)
{
    TrajectoryPoint p;
    p.pose = rec.pose;
    p.action = action;
    p.record_id = rec.record_id;
    p.distance = footprint_distance(rec.pose.position, target.bbox3d);
    p.target_visible = rec.directly_visible(target.id);
    p.reflection_visible = rec.find_visible(target.id, true) != nullptr;
    return p;
}

} // namespace

void classify_episode(NavEpisode& ep, double success_radius, const EpisodeConfig& config)
{
    require(!ep.trajectory.empty(), "episode has no trajectory");
    const auto& traj = ep.trajectory;
    ep.steps = static_cast<int>(traj.size()) - 1;
    ep.d0 = traj.front().distance;
    ep.dT = traj.back().distance;
    ep.success = ep.dT <= success_radius && traj.back().target_visible;
    ep.first_seen_step.reset();
    for (std::size_t t = 0; t < traj.size(); ++t) {
        if (traj[t].target_visible) {
            ep.first_seen_step = static_cast<int>(t);
            break;
        }
    }
    // The reflection flag needs scene geometry, so it survives re-classification.
    NavEvent ev = has(ep.events, NavEvent::chased_reflection) ? NavEvent::chased_reflection : NavEvent::none;
    if (ep.first_seen_step) {
        const std::size_t s = static_cast<std::size_t>(*ep.first_seen_step);
        int after = 0, away = 0;
        for (std::size_t t = s + 1; t < traj.size(); ++t) {
            ++after;
            if (traj[t].distance > traj[t - 1].distance + 1e-9) ++away;
        }
        if (after > 0 && away > config.neglect_majority * after) ev = ev | NavEvent::moved_away_after_seen;
    }
    if (ep.terminated && !ep.success && ep.error.empty()) ev = ev | NavEvent::early_termination;
    ep.events = ev;
}

EpisodeOutput run_episode(const sim::Scene& scene, const task::TaskInstance& inst, Solver& solver,
                          std::uint64_t first_timestamp, const EpisodeConfig& config)
{
    require(task::is_interactive(inst.type()) && inst.nav_goal.has_value(), "run_episode needs a navigation instance");
    const task::NavGoal& goal = *inst.nav_goal;
    const sim::SceneEntity* target = scene.find(goal.target_id);
    if (!target) throw Error(Errc::missing_entity, "navigation target " + goal.target_id + " not in " + scene.id);
    const std::vector<Vec3> mirrors = reflection_points(scene, *target);

    EpisodeOutput out;
    NavEpisode& ep = out.episode;
    ep.task_ref = inst.id;
    ep.target_id = goal.target_id;
    std::uint64_t ts = first_timestamp;
    out.observations.push_back(sim::render(scene, inst.pose, sim::View::ego, ts++));
    ep.trajectory.push_back(observe(*target, out.observations.back(), std::nullopt));

    bool chased = false;
    try {
        solver.begin_episode(inst);
        for (int step = 0; step < goal.max_steps; ++step) {
            const sim::ObservationRecord& obs = out.observations.back();
            const NavAction a = solver.act(inst, obs, {step, goal.max_steps - step});
            if (a.terminate) {
                ep.terminated = true;
                break;
            }
            const double lim = config.motion.max_step;
            const sim::Action act{a.turn_deg, std::clamp(a.forward_m, -lim, lim)};
            const sim::AgentPose next = sim::step(scene, obs.pose, act, config.motion);
            // A step toward a mirror image of the target while the real one is hidden.
            if (!ep.trajectory.back().target_visible && ep.trajectory.back().reflection_visible) {
                for (Vec3 m : mirrors) {
                    if (horizontal(next.position, m) < horizontal(obs.pose.position, m) - 1e-9) chased = true;
                }
            }
            out.observations.push_back(sim::render(scene, next, sim::View::ego, ts++));
            ep.trajectory.push_back(observe(*target, out.observations.back(), act));
        }
    } catch (const std::exception& e) {
        if (!is_solver_error(e)) throw;
        ep.error = e.what();
    }
    classify_episode(ep, goal.success_radius, config);
    if (chased) ep.events = ep.events | NavEvent::chased_reflection;
    return out;
}

void to_json(json& j, const NavEpisode& e)
{
    json traj = json::array();
    for (const auto& p : e.trajectory) {
        json pose;
        sim::to_json(pose, p.pose);
        json action = nullptr;
        if (p.action) action = {{"turn_deg", p.action->turn_deg}, {"forward_m", p.action->forward_m}};
        traj.push_back({{"pose", pose},
                        {"action", action},
                        {"record_id", p.record_id},
                        {"distance", p.distance},
                        {"target_visible", p.target_visible},
                        {"reflection_visible", p.reflection_visible}});
    }
    j = json{{"task_ref", e.task_ref},
             {"target_id", e.target_id},
             {"trajectory", traj},
             {"d0", e.d0},
             {"dT", e.dT},
             {"steps", e.steps},
             {"success", e.success},
             {"first_seen_step", e.first_seen_step ? json(*e.first_seen_step) : json(nullptr)},
             {"events", static_cast<unsigned>(e.events)},
             {"terminated", e.terminated},
             {"error", e.error}};
}

void from_json(const json& j, NavEpisode& e)
{
    e.task_ref = j.at("task_ref").get<std::string>();
    e.target_id = j.at("target_id").get<std::string>();
    e.trajectory.clear();
    for (const auto& p : j.at("trajectory")) {
        TrajectoryPoint t;
        sim::from_json(p.at("pose"), t.pose);
        if (!p.at("action").is_null()) {
            t.action = sim::Action{p.at("action").at("turn_deg").get<double>(), p.at("action").at("forward_m").get<double>()};
        }
        t.record_id = p.at("record_id").get<std::string>();
        t.distance = p.at("distance").get<double>();
        t.target_visible = p.at("target_visible").get<bool>();
        t.reflection_visible = p.at("reflection_visible").get<bool>();
        e.trajectory.push_back(std::move(t));
    }
    e.d0 = j.at("d0").get<double>();
    e.dT = j.at("dT").get<double>();
    e.steps = j.at("steps").get<int>();
    e.success = j.at("success").get<bool>();
    e.first_seen_step.reset();
    if (!j.at("first_seen_step").is_null()) e.first_seen_step = j.at("first_seen_step").get<int>();
    e.events = static_cast<NavEvent>(j.at("events").get<unsigned>());
    e.terminated = j.at("terminated").get<bool>();
    e.error = j.at("error").get<std::string>();
}

} // namespace insitu::harness
