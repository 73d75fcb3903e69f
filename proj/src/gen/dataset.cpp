#include "insitu/gen/dataset.hpp"

#include "insitu/core/error.hpp"

namespace insitu::gen {

const sim::ObservationRecord* DataSet::find(const std::string& record_id) const noexcept
{
    for (const auto& r : records) {
        if (r.record_id == record_id) return &r;
    }
    return nullptr;
}

void validate_dataset(const DataSet& d)
{
    for (std::size_t i = 1; i < d.records.size(); ++i) {
        require(d.records[i].timestamp > d.records[i - 1].timestamp,
                "record timestamps must be strictly increasing (at " + d.records[i].record_id + ")");
    }
    require(d.loop_index >= 0, "loop_index must be >= 0");
}

std::set<task::TaskType> all_generated_types()
{
    return {task::kGeneratedTaskTypes.begin(), task::kGeneratedTaskTypes.end()};
}

void validate_loop_config(const LoopConfig& c)
{
    require(c.epsilon >= 0.0 && c.epsilon <= 1.0, "epsilon must lie in [0, 1]");
    for (double e : c.epsilon_schedule) require(e >= 0.0 && e <= 1.0, "epsilon schedule entries must lie in [0, 1]");
    require(c.filter_k >= 1, "filter_k must be >= 1");
    require(c.max_steps_per_task >= 1, "max_steps_per_task must be >= 1");
    require(c.walk_steps >= 0, "walk_steps must be >= 0");
    for (auto t : c.enabled_generators) require(t != task::TaskType::composite, "composite has no generator");
}

} // namespace insitu::gen
