#include "insitu/gen/loop.hpp"

#include <algorithm>
#include <cstdio>

#include "insitu/core/error.hpp"

namespace insitu::gen {

using namespace task;

namespace {

/// Replaces each action with a random step with probability epsilon.
class EpsilonSolver final : public harness::Solver {
public:
    EpsilonSolver(harness::Solver* inner, const sim::Scene& scene, double epsilon, Rng rng, sim::MotionConfig motion)
        : inner_(inner), scene_(scene), epsilon_(epsilon), rng_(rng), motion_(motion)
    {
    }

    AttributeValue answer(const TaskInstance& inst, const sim::ObservationRecord& obs) override
    {
        return inner_->answer(inst, obs);
    }
    void begin_episode(const TaskInstance& inst) override
    {
        if (epsilon_ < 1.0) inner_->begin_episode(inst);
    }
    harness::NavAction act(const TaskInstance& inst, const sim::ObservationRecord& obs,
                           const harness::NavContext& ctx) override
    {
        if (rng_.bernoulli(epsilon_)) {
            const sim::WalkStep w = sim::random_walk(scene_, obs.pose, rng_, motion_);
            return {w.action.turn_deg, w.action.forward_m, false};
        }
        return inner_->act(inst, obs, ctx);
    }

private:
    harness::Solver* inner_;
    const sim::Scene& scene_;
    double epsilon_;
    Rng rng_;
    sim::MotionConfig motion_;
};

std::vector<TaskInstance> interactive_subset(const std::vector<TaskInstance>& tasks)
{
    std::vector<TaskInstance> out;
    for (const auto& t : tasks) {
        if (is_interactive(t.type())) out.push_back(t);
    }
    return out;
}

void random_walk_records(DataSet& d, const sim::Scene& scene, const LoopConfig& config, Rng rng, std::uint64_t& ts)
{
    d.records.push_back(sim::render(scene, scene.agent_spawn, sim::View::ego, ts++));
    d.records.push_back(sim::render(scene, scene.surveillance_pose, sim::View::surveillance, ts++));
    sim::AgentPose pose = scene.agent_spawn;
    for (int s = 0; s < config.walk_steps; ++s) {
        pose = sim::random_walk(scene, pose, rng).pose;
        d.records.push_back(sim::render(scene, pose, sim::View::ego, ts++));
    }
}

} // namespace

ReceiveResult receive(const std::vector<TaskInstance>& tasks, harness::Solver* solver, const sim::Scene& scene,
                      const LoopConfig& config, int loop_index, std::uint64_t first_timestamp)
{
    validate_loop_config(config);
    require(loop_index >= 0, "loop index must be >= 0");
    const Rng rng = Rng(config.seed).substream("receive").substream(static_cast<std::uint64_t>(loop_index));
    ReceiveResult out;
    out.data.scene_ref = scene.id;
    out.data.loop_index = loop_index;
    std::uint64_t ts = first_timestamp;

    const std::vector<TaskInstance> inter = interactive_subset(tasks);
    const bool per_step = config.epsilon_mode == EpsilonMode::per_step && !inter.empty();
    if (!per_step) {
        Rng branch = rng.substream("branch");
        out.stats.explored = branch.bernoulli(config.epsilon);
        if (out.stats.explored) {
            random_walk_records(out.data, scene, config, rng.substream("walk"), ts);
            return out;
        }
    }
    if (inter.empty()) return out;
    require(solver != nullptr, "executing interactive tasks needs a solver");

    EpsilonSolver eps(solver, scene, config.epsilon, rng.substream("step"), {});
    harness::Solver& agent = per_step ? static_cast<harness::Solver&>(eps) : *solver;
    for (TaskInstance t : inter) {
        t.nav_goal->max_steps = std::min(t.nav_goal->max_steps, config.max_steps_per_task);
        harness::EpisodeOutput ep = harness::run_episode(scene, t, agent, ts);
        ts += ep.observations.size();
        ++out.stats.episodes;
        if (!ep.episode.error.empty()) {
            ++out.stats.solver_failures;
            out.stats.errors.push_back(t.id + ": " + ep.episode.error);
        }
        for (auto& r : ep.observations) out.data.records.push_back(std::move(r));
        out.episodes.push_back(std::move(ep.episode));
    }
    return out;
}

std::vector<LoopArtifacts> run_loop(const sim::Scene& scene, const GeneratorRegistry& registry, const LoopConfig& config,
                                    int n_loops, harness::Solver* solver)
{
    require(n_loops >= 1, "run_loop needs n_loops >= 1");
    validate_loop_config(config);
    registry.check_covers(config.enabled_generators);
    std::vector<LoopArtifacts> loops;
    std::vector<TaskInstance> carried;
    std::uint64_t ts = 0;
    for (int i = 0; i < n_loops; ++i) {
        try {
            LoopArtifacts a;
            a.loop_index = i;
            LoopConfig c = config;
            if (!config.epsilon_schedule.empty()) {
                c.epsilon = config.epsilon_schedule[std::min<std::size_t>(static_cast<std::size_t>(i), config.epsilon_schedule.size() - 1)];
            }
            a.epsilon = c.epsilon;
            ReceiveResult r = receive(carried, solver, scene, c, i, ts);
            if (!r.data.records.empty()) ts = r.data.records.back().timestamp + 1;
            a.data = std::move(r.data);
            a.stats = std::move(r.stats);
            a.episodes = std::move(r.episodes);
            if (!a.data.empty()) {
                char prefix[16];
                std::snprintf(prefix, sizeof prefix, "l%d_", i);
                a.tasks = generate_tasks(a.data, registry, scene, c, prefix);
            }
            const DataSet& data = a.data;
            filter::RecordLookup lookup = [&data](const TaskInstance&, const std::string& id) { return data.find(id); };
            filter::ClusterConfig cc;
            cc.seed = Rng(config.seed).substream("filter").substream(static_cast<std::uint64_t>(i)).next();
            if (config.use_filter) {
                a.filtered = filter::filter_tasks(interactive_subset(a.tasks), config.filter_k,
                                                  filter::default_encoders(scene, lookup), cc);
                carried = a.filtered.representatives;
            } else {
                carried = interactive_subset(a.tasks);
            }
            loops.push_back(std::move(a));
        } catch (const Error& e) {
            throw Error(e.code(), "loop " + std::to_string(i) + ": " + e.what());
        }
    }
    return loops;
}

std::vector<TaskInstance> pooled_tasks(const std::vector<LoopArtifacts>& loops)
{
    std::vector<TaskInstance> out;
    for (const auto& l : loops) out.insert(out.end(), l.tasks.begin(), l.tasks.end());
    return out;
}

} // namespace insitu::gen
