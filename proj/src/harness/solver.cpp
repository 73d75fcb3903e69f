#include "insitu/harness/solver.hpp"

#include "insitu/core/error.hpp"
#include "insitu/gen/grounding.hpp"

namespace insitu::harness {

bool is_solver_error(const std::exception& e) noexcept
{
    const auto* err = dynamic_cast<const Error*>(&e);
    if (!err) return false;
    switch (err->code()) {
    case Errc::solver_failure:
    case Errc::solver_timeout:
    case Errc::unreachable:
    case Errc::malformed_response:
    case Errc::timeout: return true;
    default: return false;
    }
}

OracleSolver::OracleSolver(const sim::Scene& scene, sim::PlannerConfig planner) : scene_(scene), planner_(planner) {}

task::AttributeValue OracleSolver::answer(const task::TaskInstance& inst, const sim::ObservationRecord& obs)
{
    return gen::derive_ground_truth(inst, scene_, obs);
}

void OracleSolver::begin_episode(const task::TaskInstance&)
{
    plan_.reset();
    planned_ = false;
}

NavAction OracleSolver::act(const task::TaskInstance& inst, const sim::ObservationRecord& obs, const NavContext& ctx)
{
    if (!planned_) {
        require(inst.nav_goal.has_value(), "oracle navigation needs a nav goal");
        const sim::SceneEntity* target = scene_.find(inst.nav_goal->target_id);
        if (!target) throw Error(Errc::solver_failure, "target " + inst.nav_goal->target_id + " not in scene");
        plan_ = sim::plan_to_target(scene_, obs.pose, *target, planner_);
        planned_ = true;
    }
    const auto i = static_cast<std::size_t>(ctx.step_index);
    if (!plan_ || i >= plan_->size()) return {0.0, 0.0, true};
    return {(*plan_)[i].turn_deg, (*plan_)[i].forward_m, false};
}

} // namespace insitu::harness
