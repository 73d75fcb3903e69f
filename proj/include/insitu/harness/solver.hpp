#pragma once

#include <optional>
#include <vector>

#include "insitu/sim/planner.hpp"
#include "insitu/sim/render.hpp"
#include "insitu/task/task.hpp"

namespace insitu::harness {

struct NavAction {
    double turn_deg = 0.0;
    double forward_m = 0.0;
    bool terminate = false;
    friend bool operator==(const NavAction&, const NavAction&) = default;
};

struct NavContext {
    int step_index = 0;
    int remaining_steps = 0;
};

/**
 * Anything that answers static tasks and drives navigation episodes.
 * Failures are reported as insitu::Error with a solver-side code
 * (solver_failure, solver_timeout, unreachable, malformed_response, timeout).
 */
class Solver {
public:
    virtual ~Solver() = default;

    virtual task::AttributeValue answer(const task::TaskInstance& inst, const sim::ObservationRecord& obs) = 0;

    /// Called once before the first act() of an episode.
    virtual void begin_episode(const task::TaskInstance&) {}
    virtual NavAction act(const task::TaskInstance& inst, const sim::ObservationRecord& obs, const NavContext& ctx) = 0;

    /// answer() may be called concurrently.
    virtual bool thread_safe() const noexcept { return false; }
};

/// True for the codes a solver may raise; anything else is a bug upstream.
bool is_solver_error(const std::exception& e) noexcept;

/**
 * Reference agent with full scene access. Static answers are re-derived from
 * the scene and the observation (never read from the instance), and
 * navigation follows the grid planner's plan, computed at the first step.
 */
class OracleSolver final : public Solver {
public:
    explicit OracleSolver(const sim::Scene& scene, sim::PlannerConfig planner = {});

    task::AttributeValue answer(const task::TaskInstance& inst, const sim::ObservationRecord& obs) override;
    void begin_episode(const task::TaskInstance& inst) override;
    NavAction act(const task::TaskInstance& inst, const sim::ObservationRecord& obs, const NavContext& ctx) override;
    bool thread_safe() const noexcept override { return true; }

private:
    const sim::Scene& scene_;
    sim::PlannerConfig planner_;
    std::optional<std::vector<sim::Action>> plan_;
    bool planned_ = false;
};

} // namespace insitu::harness
