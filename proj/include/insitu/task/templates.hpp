#pragma once

#include <optional>

#include "insitu/task/task.hpp"

namespace insitu::task {

/// Vertex ids used by the canonical templates.
namespace vid {
inline constexpr VertexId v0{0};
inline constexpr VertexId v1{1};
inline constexpr VertexId v2{2};
} // namespace vid

/**
 * Abstract template for a generated task type. Layouts (given -> added):
 *
 *   classification        o{image_ref} -> o.label
 *   localization          a{image_ref}, o{label}, a-vis->o -> o.bbox2d
 *   depth_estimation      o{image_ref} -> o.depth
 *   embodied_counting     a{image_ref}, c{label}, a-vis->c -> edge.count
 *   pattern_counting      a{image_ref}, c{color}, a-vis->c -> edge.count
 *   mirror_counting       a{image_ref}, m:region{label}, c{label}, a-vis->m, m-vis->c -> (m,c).count
 *   relationship_detection o1{image_ref,label}, o2{image_ref,label}, o1-spatial->o2 -> edge.relation
 *   in_view_check         a{position}, o{label}, a-vis->o -> edge.visible
 *   label_navigation      a{position}, o{label}, a-spatial->o -> edge.reached
 *   picture_navigation    a{position}, o{image_ref}, a-spatial->o -> edge.reached
 *
 * Throws Errc::precondition for TaskType::composite.
 */
Task canonical_template(TaskType type);

/// Generated type whose canonical template is isomorphic to `t`, if any.
std::optional<TaskType> infer_task_type(const Task& t);

/// Slot names read by every generator.
namespace slot {
inline constexpr const char* label = "label";
inline constexpr const char* image_ref = "image_ref";
inline constexpr const char* position = "position";
inline constexpr const char* bbox2d = "bbox2d";
inline constexpr const char* bbox3d = "bbox3d";
inline constexpr const char* depth = "depth";
inline constexpr const char* count = "count";
inline constexpr const char* color = "color";
inline constexpr const char* relation = "relation";
inline constexpr const char* visible = "visible";
inline constexpr const char* reached = "reached";
} // namespace slot

} // namespace insitu::task
