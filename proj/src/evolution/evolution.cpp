#include "insitu/evolution/evolution.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>

#include "insitu/core/error.hpp"
#include "insitu/gen/grounding.hpp"
#include "insitu/task/matching.hpp"
#include "insitu/task/templates.hpp"

namespace insitu::evolution {

using namespace task;

namespace {

using InstanceKey = std::tuple<TaskType, Binding, std::string>;

InstanceKey key_of(const TaskInstance& i) { return {i.type(), i.scene_binding, i.record_id}; }

/// Observation an instance was grounded against.
std::optional<sim::ObservationRecord> record_for(const TaskInstance& src, const sim::Scene& scene,
                                                 const filter::RecordLookup& lookup)
{
    if (lookup) {
        if (const sim::ObservationRecord* r = lookup(src, src.record_id)) return *r;
    }
    try {
        return gen::rerender(scene, src);
    } catch (const Error&) {
        return std::nullopt;
    }
}

bool grounding_skip(const Error& e)
{
    switch (e.code()) {
    case Errc::no_visible_entity:
    case Errc::missing_entity:
    case Errc::unbound_slot:
    case Errc::pose_out_of_bounds: return true;
    default: return false;
    }
}

std::optional<TaskInstance> try_ground(const Task& tmpl, const sim::Scene& scene, const sim::ObservationRecord& rec,
                                       const Binding& b, const TaskInstance& parent, Source source)
{
    try {
        TaskInstance inst = gen::ground(tmpl, scene, rec, b);
        inst.source = source;
        inst.created_at = parent.created_at;
        inst.pose = parent.pose;
        if (inst.nav_goal && parent.nav_goal) inst.nav_goal = NavGoal{inst.nav_goal->target_id, parent.nav_goal->success_radius, parent.nav_goal->max_steps};
        return inst;
    } catch (const Error& e) {
        if (grounding_skip(e)) return std::nullopt;
        throw;
    }
}

Slots given_slots(const TaskGraph& initial, VertexId v)
{
    const Vertex* x = initial.find(v);
    return x ? x->attributes : Slots{};
}

std::set<std::string> names(const Slots& s)
{
    std::set<std::string> out;
    for (const auto& [n, v] : s) out.insert(n);
    return out;
}

/// a with slot `from` of vertex `v` renamed to `to`, in both states.
std::optional<Task> exchange(const Task& a, VertexId v, const std::string& from, const std::string& to)
{
    auto rename = [&](const TaskGraph& g) -> std::optional<TaskGraph> {
        std::vector<Vertex> vs = g.vertices();
        for (auto& x : vs) {
            if (x.id != v || !x.attributes.count(from)) continue;
            if (x.attributes.count(to)) return std::nullopt;
            x.attributes.erase(from);
            x.attributes.emplace(to, Unbound{});
        }
        return TaskGraph(std::move(vs), g.edges());
    };
    auto ini = rename(a.initial);
    auto fin = rename(a.final_state);
    if (!ini || !fin) return std::nullopt;
    Task t{*ini, *fin, TaskType::composite, true};
    t.task_type = infer_task_type(t).value_or(TaskType::composite);
    if (!task_valid(t)) return std::nullopt;
    return t;
}

bool known(const std::vector<Task>& set, const Task& t)
{
    return std::any_of(set.begin(), set.end(), [&](const Task& k) { return tasks_isomorphic(k, t); });
}

void exchanges_from(const Task& a, const Task& b, const EvolutionRules& rules, std::vector<Task>& out, bool& any_pair)
{
    for (const auto& va : a.final_state.vertices()) {
        for (const auto& vb : b.final_state.vertices()) {
            if (va.semantic_type != vb.semantic_type) continue;
            const auto ga = names(given_slots(a.initial, va.id));
            const auto gb = names(given_slots(b.initial, vb.id));
            if (ga == gb) continue;
            any_pair = true;
            for (const auto& [x, y] : rules.exchangeable) {
                for (const auto& [from, to] : {std::pair{x, y}, std::pair{y, x}}) {
                    if (!ga.count(from) || ga.count(to) || !gb.count(to)) continue;
                    if (auto t = exchange(a, va.id, from, to)) out.push_back(std::move(*t));
                }
            }
        }
    }
}

/// Same vertex ids, semantic types and edges: t was rewritten from p.
bool same_skeleton(const Task& t, const Task& p)
{
    const auto& tv = t.final_state.vertices();
    const auto& pv = p.final_state.vertices();
    if (tv.size() != pv.size()) return false;
    for (std::size_t i = 0; i < tv.size(); ++i) {
        if (tv[i].id != pv[i].id || tv[i].semantic_type != pv[i].semantic_type) return false;
    }
    const auto& te = t.final_state.edges();
    const auto& pe = p.final_state.edges();
    if (te.size() != pe.size()) return false;
    for (std::size_t i = 0; i < te.size(); ++i) {
        if (te[i].src != pe[i].src || te[i].dst != pe[i].dst || te[i].relation_kind != pe[i].relation_kind) return false;
    }
    return true;
}

} // namespace

std::vector<Task> templates_of(const std::vector<TaskInstance>& tau)
{
    std::vector<Task> out;
    for (const auto& i : tau) {
        Task t = gen::as_template(i.task);
        if (!known(out, t)) out.push_back(std::move(t));
    }
    return out;
}

std::vector<TaskInstance> reuse(const Task& target, const std::vector<TaskInstance>& sources, const sim::Scene& scene,
                                const filter::RecordLookup& lookup)
{
    require(target.is_template, "reuse needs a template");
    std::vector<TaskInstance> out;
    if (target.task_type == TaskType::composite) return out;
    std::set<InstanceKey> seen;
    for (const auto& src : sources) {
        const auto maps = substructure_mappings(target.final_state, src.task.final_state);
        if (maps.empty()) continue;
        const auto rec = record_for(src, scene, lookup);
        if (!rec) continue;
        for (const auto& m : maps) {
            Binding b;
            for (const auto& [tv, sv] : m) {
                auto it = src.scene_binding.find(sv);
                if (it != src.scene_binding.end()) b[tv] = it->second;
            }
            auto inst = try_ground(target, scene, *rec, b, src, Source::reuse);
            if (inst && seen.insert(key_of(*inst)).second) out.push_back(std::move(*inst));
        }
    }
    return out;
}

std::vector<Task> recombine(const Task& a, const Task& b, const EvolutionRules& rules)
{
    if (tasks_isomorphic(a, b)) return {};
    std::vector<Task> raw;
    bool any_pair = false;
    exchanges_from(a, b, rules, raw, any_pair);
    exchanges_from(b, a, rules, raw, any_pair);
    if (!any_pair) throw Error(Errc::no_exchangeable_vertices, "no same-typed vertices with differing slots");
    std::vector<Task> out;
    for (auto& t : raw) {
        if (tasks_isomorphic(t, a) || tasks_isomorphic(t, b) || known(out, t)) continue;
        out.push_back(std::move(t));
    }
    return out;
}

EvolveResult evolve(const std::vector<TaskInstance>& tau, const sim::Scene& scene, const EvolutionRules& rules,
                    const filter::RecordLookup& lookup)
{
    require(!tau.empty(), "evolve needs a non-empty task set");
    EvolveResult res;
    res.templates = templates_of(tau);

    // Recombined template -> the parent template it was rewritten from.
    std::vector<std::pair<Task, Task>> lineage;
    if (rules.recombination) {
        for (std::size_t done = 0; done < res.templates.size();) {
            const std::size_t end = res.templates.size();
            for (std::size_t i = 0; i < end; ++i) {
                for (std::size_t j = std::max(i + 1, done); j < end; ++j) {
                    std::vector<Task> outs;
                    try {
                        outs = recombine(res.templates[i], res.templates[j], rules);
                    } catch (const Error& e) {
                        if (e.code() != Errc::no_exchangeable_vertices) throw;
                    }
                    for (auto& t : outs) {
                        if (known(res.templates, t)) continue;
                        res.templates.push_back(t);
                        res.new_templates.push_back(t);
                        for (const Task* p : {&res.templates[i], &res.templates[j]}) {
                            if (same_skeleton(t, *p)) lineage.emplace_back(t, *p);
                        }
                    }
                }
            }
            done = end;
        }
    }

    std::set<InstanceKey> seen;
    for (const auto& i : tau) seen.insert(key_of(i));
    auto emit = [&](TaskInstance inst) {
        if (!rules.enabled_types.count(inst.type())) return true;
        if (!seen.insert(key_of(inst)).second) return true;
        if (res.instances.size() >= rules.budget) {
            res.budget_exceeded = true;
            return false;
        }
        char buf[16];
        std::snprintf(buf, sizeof buf, "e%05zu", res.instances.size());
        inst.id = buf;
        res.instances.push_back(std::move(inst));
        return true;
    };

    if (rules.reuse) {
        for (const auto& t : res.templates) {
            if (t.task_type == TaskType::composite || !rules.enabled_types.count(t.task_type)) continue;
            for (auto& inst : reuse(t, tau, scene, lookup)) {
                if (!emit(std::move(inst))) goto done;
            }
        }
    }
    for (const auto& [t, parent] : lineage) {
        if (t.task_type == TaskType::composite || !rules.enabled_types.count(t.task_type)) continue;
        for (const auto& src : tau) {
            if (src.task.final_state.size() != t.final_state.size()) continue;
            if (!tasks_isomorphic(gen::as_template(src.task), parent)) continue;
            // Same vertex ids as the parent, so the parent's binding applies.
            const auto rec = record_for(src, scene, lookup);
            if (!rec) continue;
            auto inst = try_ground(t, scene, *rec, src.scene_binding, src, Source::recombination);
            if (inst && !emit(std::move(*inst))) goto done;
        }
    }
done:
    for (const auto& t : res.new_templates) {
        if (t.task_type == TaskType::composite) {
            res.notes.push_back("composite template kept without grounding");
        }
    }
    if (res.budget_exceeded) res.notes.push_back("budget of " + std::to_string(rules.budget) + " new instances reached");
    return res;
}

} // namespace insitu::evolution
