#include "insitu/gen/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>

#include "insitu/core/error.hpp"
#include "insitu/gen/grounding.hpp"
#include "insitu/task/templates.hpp"

namespace insitu::gen {

using namespace task;
using sim::ObservationRecord;
using sim::Scene;
using sim::SceneEntity;

namespace {

const TemplatePromptRenderer kTemplateRenderer;

TaskInstance make(TaskType type, const ObservationRecord& r, const Scene& s, const std::vector<const SceneEntity*>& objects)
{
    const Task tmpl = canonical_template(type);
    Binding b;
    std::size_t next = 0;
    for (const auto& v : tmpl.final_state.vertices()) {
        switch (v.semantic_type) {
        case SemanticType::agent: b[v.id] = std::string(kAgentBinding); break;
        case SemanticType::region:
        case SemanticType::scene: b[v.id] = s.id; break;
        case SemanticType::object:
            require(next < objects.size(), "not enough objects for template");
            b[v.id] = objects[next++]->id;
            break;
        }
    }
    TaskInstance inst = ground(tmpl, s, r, b);
    inst.prompt = kTemplateRenderer.render(inst, s);
    return inst;
}

void require_ego(const ObservationRecord& r, TaskType t)
{
    require(r.view == sim::View::ego, std::string(to_string(t)) + " needs an ego record");
}

/// Non-mirror entities directly visible with enough pixels, in buffer order.
std::vector<const SceneEntity*> direct_visible(const ObservationRecord& r, const Scene& s)
{
    std::vector<const SceneEntity*> out;
    for (const auto& v : r.visible_entities) {
        if (v.via_mirror || v.pixel_count < kMinVisiblePixels) continue;
        const SceneEntity* e = s.find(v.id);
        if (e && !e->is_mirror) out.push_back(e);
    }
    return out;
}

template <class T>
const T& pick(const std::vector<T>& xs, Rng& rng)
{
    return xs[rng.index(xs.size())];
}

const SceneEntity* pick_visible(const ObservationRecord& r, const Scene& s, Rng& rng, bool unique)
{
    std::vector<const SceneEntity*> c = direct_visible(r, s);
    if (unique) std::erase_if(c, [&](const SceneEntity* e) { return !has_unique_description(s, *e); });
    if (c.empty()) throw Error(Errc::no_visible_entity, "no eligible visible entity in " + r.record_id);
    return pick(c, rng);
}

const SceneEntity* first_with_label(const Scene& s, const ObservationRecord& r, const std::string& label, bool via_mirror)
{
    for (const auto& e : s.entities) {
        if (!e.is_mirror && e.label == label && r.find_visible(e.id, via_mirror)) return &e;
    }
    return nullptr;
}

std::vector<std::string> distinct_labels(const ObservationRecord& r, const Scene& s, bool via_mirror)
{
    std::set<std::string> labels;
    for (const auto& v : r.visible_entities) {
        if (v.via_mirror != via_mirror) continue;
        const SceneEntity* e = s.find(v.id);
        if (e && !e->is_mirror) labels.insert(e->label);
    }
    return {labels.begin(), labels.end()};
}

const SceneEntity* entity_of(const TaskInstance& inst, const Scene& s, VertexId v)
{
    auto it = inst.scene_binding.find(v);
    return it == inst.scene_binding.end() ? nullptr : s.find(it->second);
}

std::string plural(const std::string& label) { return label.ends_with("s") ? label : label + "s"; }

long bin(double x, double width) { return static_cast<long>(std::floor(x / width)); }

} // namespace

bool ego_only(TaskType t) noexcept
{
    switch (t) {
    case TaskType::embodied_counting:
    case TaskType::pattern_counting:
    case TaskType::mirror_counting:
    case TaskType::in_view_check:
    case TaskType::label_navigation:
    case TaskType::picture_navigation: return true;
    default: return false;
    }
}

std::string TemplatePromptRenderer::render(const TaskInstance& inst, const Scene& s) const
{
    const SceneEntity* a = entity_of(inst, s, vid::v0);
    const SceneEntity* b = entity_of(inst, s, vid::v1);
    const SceneEntity* c = entity_of(inst, s, vid::v2);
    switch (inst.type()) {
    case TaskType::classification: return "What object is shown in the marked region of the image?";
    case TaskType::localization: return "Find the " + b->description() + " in the image and give its bounding box.";
    case TaskType::depth_estimation: return "How far from the camera is the object in the marked region, in meters?";
    case TaskType::embodied_counting: return "How many " + plural(b->label) + " can you see right now?";
    case TaskType::pattern_counting: return "How many " + b->color + " objects can you see right now?";
    case TaskType::mirror_counting: return "How many " + plural(c->label) + " are reflected in the mirror?";
    case TaskType::relationship_detection:
        return "Where is the " + a->description() + " relative to the " + b->description() + "?";
    case TaskType::in_view_check: return "Is the " + b->description() + " visible from where you are standing?";
    case TaskType::label_navigation: return "Go to the " + b->description() + ".";
    case TaskType::picture_navigation: return "Go to the object shown in the reference picture.";
    case TaskType::composite: break;
    }
    return "Solve the task.";
}

GeneratorRegistry GeneratorRegistry::defaults()
{
    GeneratorRegistry g;
    g.rule_based = {
        {TaskType::classification, g_classification},
        {TaskType::localization, g_localization},
        {TaskType::depth_estimation, g_depth},
        {TaskType::embodied_counting, g_embodied_count},
        {TaskType::pattern_counting, g_pattern_count},
        {TaskType::mirror_counting, g_mirror_count},
        {TaskType::relationship_detection, g_relationship},
        {TaskType::in_view_check, g_in_view},
        {TaskType::label_navigation,
         [](const ObservationRecord& r, const Scene& s, Rng& rng) { return g_navigation(r, s, rng, NavMode::label); }},
        {TaskType::picture_navigation,
         [](const ObservationRecord& r, const Scene& s, Rng& rng) { return g_navigation(r, s, rng, NavMode::picture); }},
    };
    g.semantic = std::make_shared<TemplatePromptRenderer>();
    return g;
}

void GeneratorRegistry::check_covers(const std::set<TaskType>& enabled) const
{
    for (TaskType t : enabled) {
        auto it = rule_based.find(t);
        require(it != rule_based.end() && it->second, "no generator registered for " + std::string(to_string(t)));
    }
}

TaskInstance g_classification(const ObservationRecord& r, const Scene& s, Rng& rng)
{
    return make(TaskType::classification, r, s, {pick_visible(r, s, rng, false)});
}

TaskInstance g_localization(const ObservationRecord& r, const Scene& s, Rng& rng)
{
    return make(TaskType::localization, r, s, {pick_visible(r, s, rng, true)});
}

TaskInstance g_depth(const ObservationRecord& r, const Scene& s, Rng& rng)
{
    return make(TaskType::depth_estimation, r, s, {pick_visible(r, s, rng, false)});
}

TaskInstance g_embodied_count(const ObservationRecord& r, const Scene& s, Rng& rng)
{
    require_ego(r, TaskType::embodied_counting);
    const auto labels = distinct_labels(r, s, false);
    if (labels.empty()) throw Error(Errc::no_eligible_label, "nothing countable in " + r.record_id);
    return make(TaskType::embodied_counting, r, s, {first_with_label(s, r, pick(labels, rng), false)});
}

TaskInstance g_pattern_count(const ObservationRecord& r, const Scene& s, Rng& rng)
{
    require_ego(r, TaskType::pattern_counting);
    // Predicate color is drawn from the whole scene, so zero matches in view is possible.
    std::set<std::string> colors;
    for (const auto& e : s.entities) {
        if (!e.is_mirror) colors.insert(e.color);
    }
    if (colors.empty()) throw Error(Errc::no_eligible_label, "scene has no colored entities");
    const std::vector<std::string> cs(colors.begin(), colors.end());
    const std::string color = pick(cs, rng);
    for (const auto& e : s.entities) {
        if (!e.is_mirror && e.color == color) return make(TaskType::pattern_counting, r, s, {&e});
    }
    throw Error(Errc::no_eligible_label, "unreachable color " + color);
}

TaskInstance g_mirror_count(const ObservationRecord& r, const Scene& s, Rng& rng)
{
    require_ego(r, TaskType::mirror_counting);
    auto labels = distinct_labels(r, s, true);
    bool via = true;
    if (labels.empty()) {
        labels = distinct_labels(r, s, false);
        via = false;
    }
    if (labels.empty()) throw Error(Errc::no_eligible_label, "nothing countable in " + r.record_id);
    return make(TaskType::mirror_counting, r, s, {first_with_label(s, r, pick(labels, rng), via)});
}

TaskInstance g_relationship(const ObservationRecord& r, const Scene& s, Rng& rng)
{
    std::vector<const SceneEntity*> c = direct_visible(r, s);
    if (c.size() < 2) throw Error(Errc::no_entity_pair, "fewer than two visible entities in " + r.record_id);
    const std::size_t i = rng.index(c.size());
    std::size_t j = rng.index(c.size() - 1);
    if (j >= i) ++j;
    return make(TaskType::relationship_detection, r, s, {c[i], c[j]});
}

TaskInstance g_in_view(const ObservationRecord& r, const Scene& s, Rng& rng)
{
    require_ego(r, TaskType::in_view_check);
    std::vector<const SceneEntity*> pos, neg;
    for (const auto& e : s.entities) {
        if (e.is_mirror || !has_unique_description(s, e)) continue;
        const sim::VisibleEntity* v = r.find_visible(e.id, false);
        if (v && v->pixel_count >= kMinVisiblePixels) pos.push_back(&e);
        else if (!v) neg.push_back(&e);
    }
    const bool want_positive = rng.bernoulli(0.5);
    const auto& first = want_positive ? pos : neg;
    const auto& second = want_positive ? neg : pos;
    if (!first.empty()) return make(TaskType::in_view_check, r, s, {pick(first, rng)});
    if (!second.empty()) return make(TaskType::in_view_check, r, s, {pick(second, rng)});
    throw Error(Errc::no_entity_pair, "no nameable entity in " + s.id);
}

bool navigation_feasible(const Scene& s, const sim::AgentPose& start, const SceneEntity& target,
                         const sim::PlannerConfig& planner)
{
    const auto plan = sim::plan_to_target(s, start, target, planner);
    if (!plan || static_cast<int>(plan->size()) > NavGoal{}.max_steps) return false;
    const sim::AgentPose end = sim::simulate(s, start, *plan, planner.motion).back();
    if (footprint_distance(end.position, target.bbox3d) > NavGoal{}.success_radius) return false;
    return sim::render(s, end, sim::View::ego).directly_visible(target.id);
}

TaskInstance g_navigation(const ObservationRecord& r, const Scene& s, Rng& rng, NavMode mode,
                          const sim::PlannerConfig& planner)
{
    const TaskType type = mode == NavMode::label ? TaskType::label_navigation : TaskType::picture_navigation;
    require_ego(r, type);
    std::vector<const SceneEntity*> c;
    for (const auto& e : s.entities) {
        if (e.is_mirror || e.bbox3d.min.z > 1e-6) continue;
        if (footprint_distance(r.pose.position, e.bbox3d) < kMinNavDistance) continue;
        if (mode == NavMode::label && !has_unique_description(s, e)) continue;
        if (mode == NavMode::picture && !r.directly_visible(e.id)) continue;
        c.push_back(&e);
    }
    // Fisher-Yates so the first feasible candidate is a uniform draw.
    for (std::size_t i = c.size(); i > 1; --i) std::swap(c[i - 1], c[rng.index(i)]);
    for (const SceneEntity* e : c) {
        if (navigation_feasible(s, r.pose, *e, planner)) return make(type, r, s, {e});
    }
    throw Error(Errc::no_distant_target, "no reachable target at least 2 m away from " + r.record_id);
}

DedupKey dedup_key(const TaskInstance& inst)
{
    return {inst.type(), inst.scene_binding, bin(inst.pose.position.x, 0.5), bin(inst.pose.position.y, 0.5),
            bin(wrap_degrees(inst.pose.yaw_deg), 15.0)};
}

std::vector<TaskInstance> generate_tasks(const DataSet& data, const GeneratorRegistry& registry, const Scene& scene,
                                         const LoopConfig& config, const std::string& id_prefix)
{
    require(!data.empty(), "generate_tasks needs a non-empty data set");
    registry.check_covers(config.enabled_generators);
    const Rng root = Rng(config.seed).substream("generate");

    std::vector<std::vector<TaskInstance>> per_record(data.records.size());
    std::vector<std::exception_ptr> failures(data.records.size());
    const long n = static_cast<long>(data.records.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        const ObservationRecord& rec = data.records[static_cast<std::size_t>(i)];
        const Rng rec_rng = root.substream(rec.record_id);
        for (TaskType t : config.enabled_generators) {
            if (ego_only(t) && rec.view != sim::View::ego) continue;
            Rng rng = rec_rng.substream(to_string(t));
            try {
                per_record[static_cast<std::size_t>(i)].push_back(registry.rule_based.at(t)(rec, scene, rng));
            } catch (const Error& e) {
                switch (e.code()) {
                case Errc::no_eligible_label:
                case Errc::no_visible_entity:
                case Errc::no_entity_pair:
                case Errc::no_distant_target: break;
                default: failures[static_cast<std::size_t>(i)] = std::current_exception();
                }
            } catch (...) {
                failures[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    std::vector<TaskInstance> out;
    std::set<DedupKey> seen;
    for (auto& batch : per_record) {
        for (auto& inst : batch) {
            if (config.deduplicate && !seen.insert(dedup_key(inst)).second) continue;
            if (registry.semantic) inst.prompt = registry.semantic->render(inst, scene);
            char buf[16];
            std::snprintf(buf, sizeof buf, "%05zu", out.size());
            inst.id = id_prefix + buf;
            out.push_back(std::move(inst));
        }
    }
    return out;
}

} // namespace insitu::gen
