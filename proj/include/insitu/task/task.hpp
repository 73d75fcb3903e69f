#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "insitu/sim/camera.hpp"
#include "insitu/task/task_graph.hpp"

namespace insitu::task {

enum class TaskType {
    classification,
    localization,
    depth_estimation,
    embodied_counting,
    mirror_counting,
    pattern_counting,
    relationship_detection,
    in_view_check,
    label_navigation,
    picture_navigation,
    composite, ///< recombined structure with no registered generator
};

inline constexpr std::array<TaskType, 10> kGeneratedTaskTypes = {
    TaskType::classification,     TaskType::localization,          TaskType::depth_estimation,
    TaskType::embodied_counting,  TaskType::mirror_counting,       TaskType::pattern_counting,
    TaskType::relationship_detection, TaskType::in_view_check,     TaskType::label_navigation,
    TaskType::picture_navigation,
};

enum class CognitiveLoad { perception, reasoning, spatial_reasoning, interaction, other };

std::string_view to_string(TaskType t) noexcept;
std::optional<TaskType> parse_task_type(std::string_view s) noexcept;
CognitiveLoad cognitive_load(TaskType t) noexcept;
std::string_view to_string(CognitiveLoad c) noexcept;
constexpr bool is_interactive(TaskType t) noexcept
{
    return t == TaskType::label_navigation || t == TaskType::picture_navigation;
}

/// An (initial, final) state pair. The final state only adds elements.
struct Task {
    TaskGraph initial;
    TaskGraph final_state;
    TaskType task_type = TaskType::composite;
    bool is_template = true;

    friend bool operator==(const Task&, const Task&) = default;
};

/// Throws Errc::precondition (or structural_regression from the diff) when
/// the task breaks its invariants: final must contain initial; templates
/// need at least one UNBOUND slot, instances none.
void validate_task(const Task& t);
bool task_valid(const Task& t) noexcept;

enum class Source { interaction, reuse, recombination };
std::string_view to_string(Source s) noexcept;
std::optional<Source> parse_source(std::string_view s) noexcept;

/// Vertex id -> scene entity id. Agent vertices bind to "agent"; region and
/// scene vertices bind to the scene id.
using Binding = std::map<VertexId, std::string>;

inline constexpr std::string_view kAgentBinding = "agent";

struct NavGoal {
    std::string target_id;
    double success_radius = 1.0;
    int max_steps = 10;

    friend bool operator==(const NavGoal&, const NavGoal&) = default;
};

/// A template grounded in a scene from one observation pose.
struct TaskInstance {
    std::string id;
    Task task;
    Binding scene_binding;
    AttributeValue ground_truth;
    std::optional<NavGoal> nav_goal;
    std::string prompt;
    std::uint64_t created_at = 0;
    Source source = Source::interaction;
    std::string scene_id;
    std::string record_id;
    sim::AgentPose pose;

    TaskType type() const noexcept { return task.task_type; }
    friend bool operator==(const TaskInstance&, const TaskInstance&) = default;
};

} // namespace insitu::task
