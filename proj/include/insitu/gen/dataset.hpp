#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "insitu/sim/render.hpp"
#include "insitu/task/task.hpp"

namespace insitu::gen {

/// The observation data D: records in strictly increasing timestamp order.
struct DataSet {
    std::vector<sim::ObservationRecord> records;
    std::string scene_ref;
    int loop_index = 0;

    bool empty() const noexcept { return records.empty(); }
    const sim::ObservationRecord* find(const std::string& record_id) const noexcept;
};

/// Throws Errc::precondition when timestamps are not strictly increasing.
void validate_dataset(const DataSet& d);

/// Whether the exploration branch is drawn once per loop or once per step.
enum class EpsilonMode { per_loop, per_step };

std::set<task::TaskType> all_generated_types();

struct LoopConfig {
    double epsilon = 1.0;                       ///< used by receive; run_loop takes it from the schedule
    std::vector<double> epsilon_schedule{1.0, 0.0};
    EpsilonMode epsilon_mode = EpsilonMode::per_loop;
    int max_steps_per_task = 10;
    int walk_steps = 10;                        ///< random-walk trajectory length
    int filter_k = 5;
    bool use_filter = true;                     ///< off: carry every interactive task forward
    std::uint64_t seed = 0;
    std::set<task::TaskType> enabled_generators = all_generated_types();
    bool deduplicate = true;
};

/// Throws Errc::precondition on out-of-range fields.
void validate_loop_config(const LoopConfig& c);

} // namespace insitu::gen
