#include "insitu/task/templates.hpp"

#include "insitu/core/error.hpp"
#include "insitu/task/matching.hpp"

namespace insitu::task {

namespace {

using SlotList = std::initializer_list<const char*>;

Slots open_slots(SlotList names)
{
    Slots s;
    for (const char* n : names) s.emplace(n, Unbound{});
    return s;
}

Vertex vertex(VertexId id, SemanticType type, SlotList slots) { return {id, type, open_slots(slots)}; }

Edge edge(VertexId src, VertexId dst, RelationKind kind, SlotList slots = {})
{
    return {src, dst, kind, open_slots(slots)};
}

Task make(TaskType type, std::vector<Vertex> iv, std::vector<Edge> ie, std::vector<Vertex> fv, std::vector<Edge> fe)
{
    return Task{TaskGraph(std::move(iv), std::move(ie)), TaskGraph(std::move(fv), std::move(fe)), type, true};
}

using enum SemanticType;
using enum RelationKind;
using namespace vid;

} // namespace

Task canonical_template(TaskType type)
{
    switch (type) {
    case TaskType::classification:
        return make(type, {vertex(v0, object, {slot::image_ref})}, {},
                    {vertex(v0, object, {slot::image_ref, slot::label})}, {});
    case TaskType::localization:
        return make(type, {vertex(v0, agent, {slot::image_ref}), vertex(v1, object, {slot::label})},
                    {edge(v0, v1, visibility)},
                    {vertex(v0, agent, {slot::image_ref}), vertex(v1, object, {slot::label, slot::bbox2d})},
                    {edge(v0, v1, visibility)});
    case TaskType::depth_estimation:
        return make(type, {vertex(v0, object, {slot::image_ref})}, {},
                    {vertex(v0, object, {slot::image_ref, slot::depth})}, {});
    case TaskType::embodied_counting:
    case TaskType::pattern_counting: {
        const char* key = type == TaskType::embodied_counting ? slot::label : slot::color;
        return make(type, {vertex(v0, agent, {slot::image_ref}), vertex(v1, object, {key})},
                    {edge(v0, v1, visibility)},
                    {vertex(v0, agent, {slot::image_ref}), vertex(v1, object, {key})},
                    {edge(v0, v1, visibility, {slot::count})});
    }
    case TaskType::mirror_counting:
        return make(type,
                    {vertex(v0, agent, {slot::image_ref}), vertex(v1, region, {slot::label}),
                     vertex(v2, object, {slot::label})},
                    {edge(v0, v1, visibility), edge(v1, v2, visibility)},
                    {vertex(v0, agent, {slot::image_ref}), vertex(v1, region, {slot::label}),
                     vertex(v2, object, {slot::label})},
                    {edge(v0, v1, visibility), edge(v1, v2, visibility, {slot::count})});
    case TaskType::relationship_detection:
        return make(type,
                    {vertex(v0, object, {slot::image_ref, slot::label}), vertex(v1, object, {slot::image_ref, slot::label})},
                    {edge(v0, v1, spatial)},
                    {vertex(v0, object, {slot::image_ref, slot::label}), vertex(v1, object, {slot::image_ref, slot::label})},
                    {edge(v0, v1, spatial, {slot::relation})});
    case TaskType::in_view_check:
        return make(type, {vertex(v0, agent, {slot::position}), vertex(v1, object, {slot::label})},
                    {edge(v0, v1, visibility)},
                    {vertex(v0, agent, {slot::position}), vertex(v1, object, {slot::label})},
                    {edge(v0, v1, visibility, {slot::visible})});
    case TaskType::label_navigation:
    case TaskType::picture_navigation: {
        const char* key = type == TaskType::label_navigation ? slot::label : slot::image_ref;
        return make(type, {vertex(v0, agent, {slot::position}), vertex(v1, object, {key})}, {edge(v0, v1, spatial)},
                    {vertex(v0, agent, {slot::position}), vertex(v1, object, {key})},
                    {edge(v0, v1, spatial, {slot::reached})});
    }
    case TaskType::composite: break;
    }
    throw Error(Errc::precondition, "composite tasks have no canonical template");
}

std::optional<TaskType> infer_task_type(const Task& t)
{
    for (TaskType type : kGeneratedTaskTypes) {
        if (tasks_isomorphic(t, canonical_template(type))) {
            return type;
        }
    }
    return std::nullopt;
}

} // namespace insitu::task
