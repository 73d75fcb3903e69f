#include <doctest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "insitu/core/error.hpp"
#include "insitu/evolution/evolution.hpp"
#include "insitu/filter/filter.hpp"
#include "insitu/gen/grounding.hpp"
#include "insitu/gen/loop.hpp"
#include "insitu/metrics/mis.hpp"
#include "insitu/sim/scene_gen.hpp"
#include "insitu/task/matching.hpp"

using namespace insitu;
using namespace insitu::evolution;
using task::TaskType;
using task::TaskInstance;

namespace {

TaskInstance grounded(TaskType t, const sim::Scene& s, const sim::ObservationRecord& r, task::Binding b)
{
    return gen::ground(task::canonical_template(t), s, r, b);
}

std::vector<TaskInstance> first_loop(std::uint64_t seed, gen::DataSet* data = nullptr)
{
    const sim::Scene s = sim::generate_scene(seed);
    gen::LoopConfig c;
    c.seed = seed;
    c.epsilon_schedule = {1.0};
    auto loops = gen::run_loop(s, gen::GeneratorRegistry::defaults(), c, 1, nullptr);
    if (data) *data = loops[0].data;
    return loops[0].tasks;
}

std::set<std::string> bound_values(const TaskInstance& t)
{
    std::set<std::string> out;
    for (const auto& [v, id] : t.scene_binding) out.insert(id);
    return out;
}

} // namespace

TEST_SUITE("evolution") {

TEST_CASE("reuse: classification over a table/cup relationship yields two classifications")
{
    const sim::Scene s = fixtures::table_scene();
    const auto rec = fixtures::spawn_view(s);
    const auto rel = grounded(TaskType::relationship_detection, s, rec, {{task::vid::v0, "cup_01"}, {task::vid::v1, "table_01"}});
    REQUIRE(rel.ground_truth == task::AttributeValue{task::RelationName{"on"}});
    const auto out = reuse(task::canonical_template(TaskType::classification), {rel}, s);
    REQUIRE(out.size() == 2);
    std::set<std::string> labels;
    for (const auto& t : out) {
        CHECK(t.type() == TaskType::classification);
        CHECK(t.source == task::Source::reuse);
        CHECK(t.record_id == rel.record_id);
        labels.insert(std::get<task::Label>(t.ground_truth).value);
    }
    CHECK(labels == std::set<std::string>{"cup", "table"});
}

TEST_CASE("reuse: no containing source gives nothing")
{
    const sim::Scene s = fixtures::table_scene();
    const auto rec = fixtures::spawn_view(s);
    const auto depth = grounded(TaskType::depth_estimation, s, rec, {{task::vid::v0, "table_01"}});
    CHECK(reuse(task::canonical_template(TaskType::classification), {depth}, s).empty());
    CHECK(reuse(task::canonical_template(TaskType::relationship_detection), {depth}, s).empty());
}

TEST_CASE("reuse over generated tasks: sound and ground truth re-derives")
{
    gen::DataSet d;
    const auto tau = first_loop(2, &d);
    const sim::Scene s = sim::generate_scene(2);
    const auto lookup = [&d](const TaskInstance&, const std::string& id) { return d.find(id); };
    std::size_t total = 0;
    for (TaskType t : task::kGeneratedTaskTypes) {
        const auto tmpl = task::canonical_template(t);
        const auto out = reuse(tmpl, tau, s, lookup);
        total += out.size();
        for (const auto& inst : out) {
            CHECK(inst.type() == t);
            CHECK(task::task_valid(inst.task));
            const auto src = std::find_if(tau.begin(), tau.end(), [&](const TaskInstance& x) {
                if (x.record_id != inst.record_id) return false;
                if (!task::is_substructure(tmpl.final_state, x.task.final_state)) return false;
                const auto bs = bound_values(x);
                const auto bi = bound_values(inst);
                return std::includes(bs.begin(), bs.end(), bi.begin(), bi.end());
            });
            CHECK(src != tau.end());
            const auto* rec = d.find(inst.record_id);
            REQUIRE(rec != nullptr);
            CHECK(gen::derive_ground_truth(inst, s, *rec) == inst.ground_truth);
        }
    }
    CHECK(total > tau.size() / 4);
}

TEST_CASE("recombine: label navigation with classification gives picture navigation")
{
    const auto nav = task::canonical_template(TaskType::label_navigation);
    const auto cls = task::canonical_template(TaskType::classification);
    const auto out = recombine(nav, cls);
    const bool found = std::any_of(out.begin(), out.end(), [](const task::Task& t) {
        return t.task_type == TaskType::picture_navigation &&
               task::tasks_isomorphic(t, task::canonical_template(TaskType::picture_navigation));
    });
    CHECK(found);
}

TEST_CASE("recombine: equal parents are a no-op, parents without a differing pair throw")
{
    const auto cls = task::canonical_template(TaskType::classification);
    CHECK(recombine(cls, cls).empty());
    try {
        recombine(cls, task::canonical_template(TaskType::depth_estimation));
        FAIL("expected NoExchangeableVertices");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::no_exchangeable_vertices);
    }
}

TEST_CASE("recombine over all template pairs: valid, typed, distinct from parents and each other")
{
    for (TaskType ta : task::kGeneratedTaskTypes) {
        for (TaskType tb : task::kGeneratedTaskTypes) {
            const auto a = task::canonical_template(ta);
            const auto b = task::canonical_template(tb);
            std::vector<task::Task> out;
            try {
                out = recombine(a, b);
            } catch (const Error& e) {
                CHECK(e.code() == Errc::no_exchangeable_vertices);
                continue;
            }
            for (std::size_t i = 0; i < out.size(); ++i) {
                CHECK(task::task_valid(out[i]));
                CHECK(out[i].is_template);
                CHECK_FALSE(task::tasks_isomorphic(out[i], a));
                CHECK_FALSE(task::tasks_isomorphic(out[i], b));
                for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(task::tasks_isomorphic(out[i], out[j]));
                if (out[i].task_type != TaskType::composite) {
                    CHECK(task::tasks_isomorphic(out[i], task::canonical_template(out[i].task_type)));
                }
            }
        }
    }
}

TEST_CASE("evolve: new instances are valid, unseen, and recompute ground truth")
{
    gen::DataSet d;
    const auto tau = first_loop(3, &d);
    const sim::Scene s = sim::generate_scene(3);
    const auto lookup = [&d](const TaskInstance&, const std::string& id) { return d.find(id); };
    const auto r = evolve(tau, s, {}, lookup);
    CHECK_FALSE(r.instances.empty());
    CHECK_FALSE(r.budget_exceeded);
    std::set<std::string> ids;
    for (const auto& t : tau) ids.insert(t.id);
    for (const auto& inst : r.instances) {
        CHECK(task::task_valid(inst.task));
        CHECK(inst.source != task::Source::interaction);
        CHECK(ids.insert(inst.id).second);
        const auto* rec = d.find(inst.record_id);
        const auto rr = rec ? *rec : gen::rerender(s, inst);
        CHECK(gen::derive_ground_truth(inst, s, rr) == inst.ground_truth);
    }
    for (const auto& t : r.new_templates) CHECK(t.is_template);
}

TEST_CASE("evolve: template set is closed after one pass")
{
    const auto tau = first_loop(1);
    const sim::Scene s = sim::generate_scene(1);
    const auto r1 = evolve(tau, s);
    std::vector<TaskInstance> all = tau;
    all.insert(all.end(), r1.instances.begin(), r1.instances.end());
    const auto r2 = evolve(all, s);
    CHECK(r2.templates.size() == r1.templates.size());
    for (const auto& t : r2.templates) {
        CHECK(std::any_of(r1.templates.begin(), r1.templates.end(),
                          [&](const task::Task& u) { return task::tasks_isomorphic(t, u); }));
    }
}

TEST_CASE("evolve: disabled types are never emitted, budget stops early")
{
    const auto tau = first_loop(4);
    const sim::Scene s = sim::generate_scene(4);
    EvolutionRules only;
    only.enabled_types = {TaskType::depth_estimation, TaskType::relationship_detection};
    for (const auto& inst : evolve(tau, s, only).instances) CHECK(only.enabled_types.count(inst.type()) == 1);

    EvolutionRules small;
    small.budget = 3;
    const auto r = evolve(tau, s, small);
    CHECK(r.budget_exceeded);
    CHECK(r.instances.size() <= 3);

    EvolutionRules none;
    none.reuse = false;
    none.recombination = false;
    CHECK(evolve(tau, s, none).instances.empty());
    CHECK_THROWS_AS(evolve({}, s), Error);
}

TEST_CASE("evolve: deterministic")
{
    const auto tau = first_loop(5);
    const sim::Scene s = sim::generate_scene(5);
    const auto a = evolve(tau, s);
    const auto b = evolve(tau, s);
    REQUIRE(a.instances.size() == b.instances.size());
    for (std::size_t i = 0; i < a.instances.size(); ++i) {
        CHECK(a.instances[i].id == b.instances[i].id);
        CHECK(a.instances[i].ground_truth == b.instances[i].ground_truth);
    }
}

TEST_CASE("innovation ratio of evolved tasks lies in [0, 1]")
{
    for (std::uint64_t seed : {1u, 6u}) {
        gen::DataSet d;
        const auto tau = first_loop(seed, &d);
        const sim::Scene s = sim::generate_scene(seed);
        const auto lookup = [&d](const TaskInstance&, const std::string& id) { return d.find(id); };
        const auto evo = evolve(tau, s, {}, lookup).instances;
        REQUIRE_FALSE(evo.empty());
        std::vector<TaskInstance> joint = tau;
        joint.insert(joint.end(), evo.begin(), evo.end());
        const auto S = filter::similarity(joint, filter::default_encoders(s, lookup));
        std::vector<std::size_t> a(tau.size()), b(evo.size());
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = i;
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = tau.size() + i;
        const auto m = metrics::mir_e(S, a, b);
        CHECK(m.value >= 0.0);
        CHECK(m.value <= 1.0);
    }
}

} // TEST_SUITE
