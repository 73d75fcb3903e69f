#include "insitu/gen/grounding.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <set>

#include "insitu/core/error.hpp"
#include "insitu/core/rng.hpp"
#include "insitu/task/templates.hpp"

namespace insitu::gen {

using namespace task;

bool rests_on(const sim::SceneEntity& a, const sim::SceneEntity& b) noexcept
{
    const Aabb& x = a.bbox3d;
    const Aabb& y = b.bbox3d;
    return footprints_overlap(x, y) && x.center().z > y.max.z && x.min.z >= y.max.z - kOnTolerance &&
           x.min.z - y.max.z <= kOnTolerance;
}

std::string spatial_relation(const sim::SceneEntity& a, const sim::SceneEntity& b, const sim::AgentPose& pose)
{
    if (rests_on(a, b)) return "on";
    if (rests_on(b, a)) return "below";
    const Aabb& x = a.bbox3d;
    const Aabb& y = b.bbox3d;
    if (footprints_overlap(x, y)) {
        if (x.min.z >= y.max.z) return "above";
        if (y.min.z >= x.max.z) return "below";
    }
    const sim::CameraFrame f = sim::camera_frame(pose);
    const double du = f.project(x.center()).u - f.project(y.center()).u;
    if (std::abs(du) > kLeftRightFraction * pose.camera.width) return du < 0 ? "left-of" : "right-of";
    if (norm(x.center() - y.center()) <= kNearDistance) return "near";
    return du < 0 ? "left-of" : "right-of";
}

bool has_unique_description(const sim::Scene& scene, const sim::SceneEntity& e) noexcept
{
    for (const auto& o : scene.entities) {
        if (o.id != e.id && o.label == e.label && o.color == e.color) return false;
    }
    return true;
}

namespace {

template <class Pred>
std::uint32_t count_visible(const sim::Scene& scene, const sim::ObservationRecord& record, bool via_mirror, Pred pred)
{
    std::uint32_t n = 0;
    for (const auto& e : scene.entities) {
        if (e.is_mirror || !pred(e)) continue;
        if (record.find_visible(e.id, via_mirror)) ++n;
    }
    return n;
}

AttributeValue reset(const AttributeValue&) { return Unbound{}; }

TaskGraph unbind(const TaskGraph& g)
{
    std::vector<Vertex> vs = g.vertices();
    std::vector<Edge> es = g.edges();
    for (auto& v : vs) {
        for (auto& [name, value] : v.attributes) value = reset(value);
    }
    for (auto& e : es) {
        for (auto& [name, value] : e.attributes) value = reset(value);
    }
    return TaskGraph(std::move(vs), std::move(es));
}

struct Resolved {
    SemanticType type;
    const sim::SceneEntity* entity = nullptr; // object vertices only
};

class Filler {
public:
    Filler(const sim::Scene& scene, const sim::ObservationRecord& record, std::map<VertexId, Resolved> resolved)
        : scene_(scene), record_(record), resolved_(std::move(resolved))
    {
    }

    AttributeValue vertex_slot(VertexId id, const std::string& name) const
    {
        const Resolved& r = resolved_.at(id);
        const sim::SceneEntity* e = r.entity;
        if (r.type == SemanticType::agent) {
            if (name == slot::image_ref) return ImageRef{record_.record_id, {0, 0, record_.raster.width, record_.raster.height}};
            if (name == slot::position) return Position{record_.pose.position};
            throw Error(Errc::precondition, "agent vertex cannot fill slot " + name);
        }
        if (r.type == SemanticType::region || r.type == SemanticType::scene) {
            if (name == slot::label) return Label{r.type == SemanticType::region ? "mirror" : scene_.id};
            if (name == slot::bbox3d) return BBox3D{scene_.bounds};
            throw Error(Errc::precondition, "region vertex cannot fill slot " + name);
        }
        if (name == slot::label) return Label{e->label};
        if (name == slot::color) return Label{e->color};
        if (name == slot::position) return Position{e->position};
        if (name == slot::bbox3d) return BBox3D{e->bbox3d};
        const sim::VisibleEntity* v = record_.find_visible(e->id, false);
        if (name == slot::image_ref || name == slot::bbox2d || name == slot::depth) {
            if (!v) throw Error(Errc::no_visible_entity, e->id + " is not directly visible in " + record_.record_id);
            if (name == slot::image_ref) return ImageRef{record_.record_id, v->box};
            if (name == slot::bbox2d) return BBox2D{v->box};
            return Depth{v->mean_depth};
        }
        throw Error(Errc::precondition, "unknown object slot " + name);
    }

    AttributeValue edge_slot(const Edge& edge, const TaskGraph& g, const std::string& name) const
    {
        const Resolved& src = resolved_.at(edge.src);
        const Resolved& dst = resolved_.at(edge.dst);
        if (name == slot::count) {
            require(dst.entity != nullptr, "count edge must end at an object vertex");
            const Vertex* dv = g.find(edge.dst);
            if (src.type == SemanticType::region) {
                return Count{count_reflected_label(scene_, record_, dst.entity->label)};
            }
            if (dv->attributes.count(slot::color)) return Count{count_direct_color(scene_, record_, dst.entity->color)};
            return Count{count_direct_label(scene_, record_, dst.entity->label)};
        }
        if (name == slot::relation) {
            require(src.entity && dst.entity, "relation edge must join two objects");
            return RelationName{spatial_relation(*src.entity, *dst.entity, record_.pose)};
        }
        if (name == slot::visible) {
            require(dst.entity != nullptr, "visibility edge must end at an object vertex");
            return AnswerBool{record_.directly_visible(dst.entity->id)};
        }
        if (name == slot::reached) return AnswerBool{true};
        throw Error(Errc::precondition, "unknown edge slot " + name);
    }

    TaskGraph fill(const TaskGraph& g) const
    {
        std::vector<Vertex> vs = g.vertices();
        std::vector<Edge> es = g.edges();
        for (auto& v : vs) {
            for (auto& [name, value] : v.attributes) value = vertex_slot(v.id, name);
        }
        for (auto& e : es) {
            for (auto& [name, value] : e.attributes) value = edge_slot(e, g, name);
        }
        return TaskGraph(std::move(vs), std::move(es));
    }

private:
    const sim::Scene& scene_;
    const sim::ObservationRecord& record_;
    std::map<VertexId, Resolved> resolved_;
};

std::string instance_hash_id(const TaskInstance& inst)
{
    std::string key = std::string(to_string(inst.type())) + "|" + inst.scene_id + "|" + inst.record_id;
    for (const auto& [v, id] : inst.scene_binding) key += "|" + std::to_string(to_int(v)) + "=" + id;
    char buf[32];
    std::snprintf(buf, sizeof buf, "task_%016" PRIx64, mix64(fnv1a(key)));
    return buf;
}

} // namespace

std::uint32_t count_direct_label(const sim::Scene& scene, const sim::ObservationRecord& record, const std::string& label)
{
    return count_visible(scene, record, false, [&](const sim::SceneEntity& e) { return e.label == label; });
}

std::uint32_t count_direct_color(const sim::Scene& scene, const sim::ObservationRecord& record, const std::string& color)
{
    return count_visible(scene, record, false, [&](const sim::SceneEntity& e) { return e.color == color; });
}

std::uint32_t count_reflected_label(const sim::Scene& scene, const sim::ObservationRecord& record, const std::string& label)
{
    return count_visible(scene, record, true, [&](const sim::SceneEntity& e) { return e.label == label; });
}

Task as_template(const Task& t)
{
    return Task{unbind(t.initial), unbind(t.final_state), t.task_type, true};
}

TaskInstance ground(const Task& tmpl, const sim::Scene& scene, const sim::ObservationRecord& record, const Binding& binding)
{
    require(tmpl.is_template, "ground needs a template");
    require(tmpl.task_type != TaskType::composite, "composite templates have no ground-truth rule");

    std::map<VertexId, Resolved> resolved;
    for (const auto& v : tmpl.final_state.vertices()) {
        auto it = binding.find(v.id);
        if (it == binding.end()) {
            throw Error(Errc::unbound_slot, "vertex " + std::to_string(to_int(v.id)) + " has no binding");
        }
        Resolved r{v.semantic_type, nullptr};
        switch (v.semantic_type) {
        case SemanticType::agent:
            if (it->second != kAgentBinding) throw Error(Errc::missing_entity, "agent vertex must bind to \"agent\"");
            break;
        case SemanticType::region:
        case SemanticType::scene:
            if (it->second != scene.id) throw Error(Errc::missing_entity, "region binds to unknown scene " + it->second);
            break;
        case SemanticType::object:
            r.entity = scene.find(it->second);
            if (!r.entity) throw Error(Errc::missing_entity, "no entity " + it->second + " in " + scene.id);
            break;
        }
        resolved.emplace(v.id, r);
    }
    for (const auto& [v, id] : binding) {
        require(tmpl.final_state.find(v) != nullptr, "binding names vertex " + std::to_string(to_int(v)) + " absent from the template");
    }

    const Filler filler(scene, record, resolved);
    TaskInstance inst;
    inst.task = Task{filler.fill(tmpl.initial), filler.fill(tmpl.final_state), tmpl.task_type, false};
    validate_task(inst.task);
    inst.scene_binding = binding;
    inst.scene_id = scene.id;
    inst.record_id = record.record_id;
    inst.pose = record.pose;
    inst.created_at = record.timestamp;
    inst.source = Source::interaction;

    const DiffSet diff = state_diff(inst.task.initial, inst.task.final_state);
    require(diff.vertices.empty() && diff.edges.empty() && diff.slots.size() == 1,
            "grounded task must add exactly one slot");
    if (is_interactive(tmpl.task_type)) {
        const sim::SceneEntity* target = nullptr;
        for (const auto& v : tmpl.final_state.vertices()) {
            if (v.semantic_type == SemanticType::object) target = resolved.at(v.id).entity;
        }
        require(target != nullptr, "navigation template needs an object vertex");
        inst.ground_truth = Label{target->id};
        inst.nav_goal = NavGoal{target->id};
    } else {
        inst.ground_truth = diff.slots.front().value;
    }
    inst.id = instance_hash_id(inst);
    return inst;
}

AttributeValue derive_ground_truth(const TaskInstance& inst, const sim::Scene& scene, const sim::ObservationRecord& record)
{
    return ground(as_template(inst.task), scene, record, inst.scene_binding).ground_truth;
}

sim::View view_of_record(const std::string& record_id)
{
    if (record_id.ends_with("_ego")) return sim::View::ego;
    if (record_id.ends_with("_srv")) return sim::View::surveillance;
    throw Error(Errc::precondition, "record id without a view suffix: " + record_id);
}

std::uint64_t timestamp_of_record(const std::string& record_id)
{
    unsigned long long t = 0;
    if (std::sscanf(record_id.c_str(), "rec_%llu_", &t) != 1) {
        throw Error(Errc::precondition, "malformed record id " + record_id);
    }
    return t;
}

sim::ObservationRecord rerender(const sim::Scene& scene, const TaskInstance& inst)
{
    return sim::render(scene, inst.pose, view_of_record(inst.record_id), timestamp_of_record(inst.record_id));
}

std::vector<std::string> bound_entities(const TaskInstance& inst, const sim::Scene& scene)
{
    std::vector<std::string> out;
    for (const auto& [v, id] : inst.scene_binding) {
        if (scene.find(id)) out.push_back(id);
    }
    return out;
}

} // namespace insitu::gen
