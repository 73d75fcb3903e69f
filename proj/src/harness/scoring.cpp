#include "insitu/harness/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "insitu/core/error.hpp"
#include "insitu/gen/grounding.hpp"

namespace insitu::harness {

using namespace task;

bool answer_correct(TaskType type, const AttributeValue& answer, const AttributeValue& truth, double* iou)
{
    if (type == TaskType::localization) {
        const auto* a = std::get_if<BBox2D>(&answer);
        const auto* t = std::get_if<BBox2D>(&truth);
        const double v = a && t ? insitu::iou(a->value, t->value) : 0.0;
        if (iou) *iou = v;
        return v >= kIouHit;
    }
    if (type == TaskType::depth_estimation) {
        const auto* a = std::get_if<Depth>(&answer);
        const auto* t = std::get_if<Depth>(&truth);
        return a && t && std::abs(a->value - t->value) <= kDepthTolerance * t->value;
    }
    return answer == truth;
}

StaticScores run_static(const std::vector<TaskInstance>& tasks, Solver& solver, const sim::Scene& scene)
{
    struct Outcome {
        bool correct = false;
        double iou = 0.0;
        bool failed = false;
    };
    for (const auto& t : tasks) require(!is_interactive(t.type()), "run_static got navigation task " + t.id);

    std::vector<Outcome> out(tasks.size());
    std::vector<std::exception_ptr> bugs(tasks.size());
    auto score_one = [&](std::size_t i) {
        const TaskInstance& t = tasks[i];
        try {
            const sim::ObservationRecord obs = gen::rerender(scene, t);
            const AttributeValue a = solver.answer(t, obs);
            out[i].correct = answer_correct(t.type(), a, t.ground_truth, &out[i].iou);
        } catch (const std::exception& e) {
            if (is_solver_error(e)) out[i].failed = true;
            else bugs[i] = std::current_exception();
        }
    };
    const long n = static_cast<long>(tasks.size());
    if (solver.thread_safe()) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < n; ++i) score_one(static_cast<std::size_t>(i));
    } else {
        for (long i = 0; i < n; ++i) score_one(static_cast<std::size_t>(i));
    }
    for (const auto& b : bugs) {
        if (b) std::rethrow_exception(b);
    }

    StaticScores s;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        for (TypeScore* ts : {&s.per_type[tasks[i].type()], &s.overall}) {
            ++ts->n;
            ts->correct += out[i].correct ? 1 : 0;
            ts->failures += out[i].failed ? 1 : 0;
        }
        if (tasks[i].type() == TaskType::localization) {
            for (TypeScore* ts : {&s.per_type[TaskType::localization], &s.overall}) {
                ts->iou_sum += out[i].iou;
                ++ts->iou_n;
            }
        }
    }
    return s;
}

double nav_gain(const NavEpisode& e) noexcept
{
    if (e.d0 <= 0.0) return 0.0;
    return std::clamp((e.d0 - e.dT) / e.d0, -1.0, 1.0);
}

bool lacks_3d_awareness(const NavEpisode& e) noexcept
{
    if (e.success) return false;
    const bool blind_stop = has(e.events, NavEvent::early_termination) && !e.first_seen_step;
    return blind_stop || has(e.events, NavEvent::chased_reflection);
}

NavMetrics compute_nav_metrics(const std::vector<NavEpisode>& episodes)
{
    require(!episodes.empty(), "no navigation episodes to score");
    NavMetrics m;
    m.episodes = static_cast<int>(episodes.size());
    for (const auto& e : episodes) {
        m.nav_gain += nav_gain(e);
        m.success_rate += e.success ? 1.0 : 0.0;
        m.step_number += e.steps;
        m.target_neglect_rate += has(e.events, NavEvent::moved_away_after_seen) ? 1.0 : 0.0;
        m.lack_3d_awareness += lacks_3d_awareness(e) ? 1.0 : 0.0;
    }
    const double n = m.episodes;
    m.nav_gain /= n;
    m.success_rate /= n;
    m.step_number /= n;
    m.target_neglect_rate /= n;
    m.lack_3d_awareness /= n;
    return m;
}

NavigationRun run_navigation(const std::vector<TaskInstance>& tasks, Solver& solver, const sim::Scene& scene,
                             const EpisodeConfig& config)
{
    NavigationRun r;
    for (const auto& t : tasks) {
        require(is_interactive(t.type()), "run_navigation got static task " + t.id);
        r.episodes.push_back(run_episode(scene, t, solver, 0, config).episode);
    }
    r.metrics = compute_nav_metrics(r.episodes);
    return r;
}

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string row(const std::string& name, const TypeScore& t)
{
    return name + "," + std::to_string(t.n) + "," + fmt(t.accuracy()) + "," + (t.iou_n ? fmt(t.miou()) : std::string()) + "," +
           std::to_string(t.failures) + "\n";
}

} // namespace

std::string static_scores_csv(const StaticScores& s)
{
    std::string out = "type,n,accuracy,miou,failures\n";
    for (const auto& [type, t] : s.per_type) out += row(std::string(to_string(type)), t);
    out += row("overall", s.overall);
    return out;
}

std::string nav_metrics_csv(const NavMetrics& m)
{
    return "episodes,nav_gain,success_rate,step_number,target_neglect_rate,lack_3d_awareness\n" +
           std::to_string(m.episodes) + "," + fmt(m.nav_gain) + "," + fmt(m.success_rate) + "," + fmt(m.step_number) +
           "," + fmt(m.target_neglect_rate) + "," + fmt(m.lack_3d_awareness) + "\n";
}

} // namespace insitu::harness
