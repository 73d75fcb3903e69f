#pragma once

#include <string>
#include <vector>

#include "insitu/sim/render.hpp"
#include "insitu/task/task.hpp"

namespace insitu::gen {

/// Vertical tolerance for resting contact in the "on" rule, m.
inline constexpr double kOnTolerance = 0.05;
/// Horizontal pixel separation, as a fraction of image width, that decides left/right.
inline constexpr double kLeftRightFraction = 0.10;
/// Centre distance under which two entities are "near", m.
inline constexpr double kNearDistance = 1.5;

/**
 * Relation of `a` to `b` seen from `pose`, first rule that fires:
 *   on       XY overlap, a's centre above b's top, a's bottom within 5 cm of it
 *   below    b is on a
 *   above / below   XY overlap with a clear vertical gap
 *   left-of / right-of   projected centres differ by > 10% of the width
 *   near     centres within 1.5 m
 *   otherwise the sign of the projected horizontal offset
 */
std::string spatial_relation(const sim::SceneEntity& a, const sim::SceneEntity& b, const sim::AgentPose& pose);

/// True when `a` rests on top of `b`.
bool rests_on(const sim::SceneEntity& a, const sim::SceneEntity& b) noexcept;

/// No other entity shares this (color, label) pair.
bool has_unique_description(const sim::Scene& scene, const sim::SceneEntity& e) noexcept;

/// Distinct entities directly visible in `record` with `label` (mirrors excluded).
std::uint32_t count_direct_label(const sim::Scene& scene, const sim::ObservationRecord& record, const std::string& label);
/// Distinct entities directly visible in `record` with `color` (mirrors excluded).
std::uint32_t count_direct_color(const sim::Scene& scene, const sim::ObservationRecord& record, const std::string& color);
/// Distinct entities with `label` seen only inside mirror regions.
std::uint32_t count_reflected_label(const sim::Scene& scene, const sim::ObservationRecord& record, const std::string& label);

/// Template with every slot reset to UNBOUND.
task::Task as_template(const task::Task& t);

/**
 * Grounds `tmpl` against `scene` as observed by `record`. Object vertices
 * bind to entity ids, agent vertices to "agent", region and scene vertices
 * to the scene id. Given slots are filled from the entity and the record;
 * added slots receive their ground-truth value, which is also returned as
 * the instance's ground_truth.
 *
 * Throws Errc::unbound_slot when a vertex has no binding, Errc::missing_entity
 * when a bound entity does not exist, Errc::no_visible_entity when an
 * image_ref or bbox2d slot needs an entity the record does not directly see,
 * and Errc::precondition for composite templates.
 */
task::TaskInstance ground(const task::Task& tmpl, const sim::Scene& scene, const sim::ObservationRecord& record,
                          const task::Binding& binding);

/// Ground truth re-derived from the scene and a record rendered at the instance pose.
task::AttributeValue derive_ground_truth(const task::TaskInstance& inst, const sim::Scene& scene,
                                         const sim::ObservationRecord& record);

/// View encoded in a record id ("..._ego" / "..._srv").
sim::View view_of_record(const std::string& record_id);
/// Timestamp encoded in a record id.
std::uint64_t timestamp_of_record(const std::string& record_id);

/// Re-renders the observation an instance was grounded against.
sim::ObservationRecord rerender(const sim::Scene& scene, const task::TaskInstance& inst);

/// Entity ids (not "agent" or the scene id) bound by an instance, in vertex order.
std::vector<std::string> bound_entities(const task::TaskInstance& inst, const sim::Scene& scene);

} // namespace insitu::gen
