#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "insitu/filter/filter.hpp"
#include "insitu/gen/generators.hpp"
#include "insitu/harness/episode.hpp"

namespace insitu::gen {

struct ReceiveStats {
    bool explored = false; ///< the per-loop draw chose the random walk
    int episodes = 0;
    int solver_failures = 0;
    std::vector<std::string> errors;
};

struct ReceiveResult {
    DataSet data;
    ReceiveStats stats;
    std::vector<harness::NavEpisode> episodes;
};

/**
 * R: turns tasks into new observations. With probability `epsilon` (drawn
 * once per loop) the agent random-walks from the spawn, recording the spawn
 * ego and surveillance views and then `walk_steps` ego views. Otherwise each
 * interactive task is executed by `solver` from its pose and every step is
 * recorded. In per-step mode each solver action is instead replaced by a
 * random step with probability epsilon. Solver errors end that episode only.
 * Record timestamps start at `first_timestamp`.
 */
ReceiveResult receive(const std::vector<task::TaskInstance>& tasks, harness::Solver* solver, const sim::Scene& scene,
                      const LoopConfig& config, int loop_index, std::uint64_t first_timestamp = 0);

struct LoopArtifacts {
    int loop_index = 0;
    double epsilon = 0.0;
    DataSet data;
    std::vector<task::TaskInstance> tasks;     ///< G(D) for this loop
    filter::FilterResult filtered;             ///< over the interactive subset of `tasks`
    ReceiveStats stats;
    std::vector<harness::NavEpisode> episodes;
};

/**
 * The cycle receive -> generate_tasks -> filter, `n_loops` times. Loop i
 * uses epsilon_schedule[i] (the last entry repeats) and executes the
 * representatives kept by loop i - 1 (every interactive task of loop i - 1
 * when config.use_filter is off). Errors are rethrown with the loop
 * index prepended to the message.
 */
std::vector<LoopArtifacts> run_loop(const sim::Scene& scene, const GeneratorRegistry& registry, const LoopConfig& config,
                                    int n_loops, harness::Solver* solver);

/// Every instance produced across all loops, in loop order.
std::vector<task::TaskInstance> pooled_tasks(const std::vector<LoopArtifacts>& loops);

} // namespace insitu::gen
