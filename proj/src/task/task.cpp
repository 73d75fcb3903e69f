#include "insitu/task/task.hpp"

#include "insitu/core/error.hpp"

namespace insitu::task {

namespace {

constexpr std::array<std::pair<TaskType, std::string_view>, 11> kTypeNames = {{
    {TaskType::classification, "classification"},
    {TaskType::localization, "localization"},
    {TaskType::depth_estimation, "depth_estimation"},
    {TaskType::embodied_counting, "embodied_counting"},
    {TaskType::mirror_counting, "mirror_counting"},
    {TaskType::pattern_counting, "pattern_counting"},
    {TaskType::relationship_detection, "relationship_detection"},
    {TaskType::in_view_check, "in_view_check"},
    {TaskType::label_navigation, "label_navigation"},
    {TaskType::picture_navigation, "picture_navigation"},
    {TaskType::composite, "composite"},
}};

} // namespace

std::string_view to_string(TaskType t) noexcept
{
    for (const auto& [type, name] : kTypeNames) {
        if (type == t) return name;
    }
    return "composite";
}

std::optional<TaskType> parse_task_type(std::string_view s) noexcept
{
    for (const auto& [type, name] : kTypeNames) {
        if (name == s) return type;
    }
    return std::nullopt;
}

CognitiveLoad cognitive_load(TaskType t) noexcept
{
    switch (t) {
    case TaskType::classification:
    case TaskType::localization:
    case TaskType::depth_estimation: return CognitiveLoad::perception;
    case TaskType::embodied_counting:
    case TaskType::mirror_counting:
    case TaskType::pattern_counting: return CognitiveLoad::reasoning;
    case TaskType::relationship_detection:
    case TaskType::in_view_check: return CognitiveLoad::spatial_reasoning;
    case TaskType::label_navigation:
    case TaskType::picture_navigation: return CognitiveLoad::interaction;
    case TaskType::composite: return CognitiveLoad::other;
    }
    return CognitiveLoad::other;
}

std::string_view to_string(CognitiveLoad c) noexcept
{
    switch (c) {
    case CognitiveLoad::perception: return "perception";
    case CognitiveLoad::reasoning: return "reasoning";
    case CognitiveLoad::spatial_reasoning: return "spatial_reasoning";
    case CognitiveLoad::interaction: return "interaction";
    case CognitiveLoad::other: return "other";
    }
    return "other";
}

std::string_view to_string(Source s) noexcept
{
    switch (s) {
    case Source::interaction: return "interaction";
    case Source::reuse: return "reuse";
    case Source::recombination: return "recombination";
    }
    return "interaction";
}

std::optional<Source> parse_source(std::string_view s) noexcept
{
    for (auto v : {Source::interaction, Source::reuse, Source::recombination}) {
        if (to_string(v) == s) return v;
    }
    return std::nullopt;
}

void validate_task(const Task& t)
{
    (void)state_diff(t.initial, t.final_state);
    const std::size_t open = t.final_state.unbound_count() + t.initial.unbound_count();
    if (t.is_template) {
        require(open > 0, "template has no UNBOUND slot");
    } else {
        if (open != 0) {
            throw Error(Errc::unbound_slot, "instance still has " + std::to_string(open) + " UNBOUND slot(s)");
        }
    }
    auto check_values = [](const TaskGraph& g) {
        for (const auto& v : g.vertices()) {
            for (const auto& [name, value] : v.attributes) {
                require(attribute_valid(value), "invalid attribute value in slot " + name);
            }
        }
        for (const auto& e : g.edges()) {
            for (const auto& [name, value] : e.attributes) {
                require(attribute_valid(value), "invalid attribute value in slot " + name);
            }
        }
    };
    check_values(t.final_state);
}

bool task_valid(const Task& t) noexcept
{
    try {
        validate_task(t);
        return true;
    } catch (const Error&) {
        return false;
    }
}

} // namespace insitu::task
