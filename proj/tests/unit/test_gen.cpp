#include <doctest.h>

#include <map>
#include <set>

#include "fixtures.hpp"
#include "insitu/core/error.hpp"
#include "insitu/gen/generators.hpp"
#include "insitu/gen/grounding.hpp"
#include "insitu/gen/loop.hpp"
#include "insitu/harness/solver.hpp"
#include "insitu/sim/scene_gen.hpp"
#include "insitu/task/matching.hpp"
#include "insitu/task/task_io.hpp"

using namespace insitu;
using namespace insitu::task;

namespace {

/// Entities with `label` seen in pixels of the given mirror state, scanned from the raster.
std::size_t raster_count(const sim::Scene& s, const sim::ObservationRecord& r, const std::string& label, bool reflected)
{
    std::set<std::uint32_t> ids;
    for (std::size_t i = 0; i < r.raster.instance.size(); ++i) {
        const std::uint32_t id = r.raster.instance[i];
        if (id == 0) continue;
        const bool refl = r.raster.mirror[i] == sim::kMirrorReflection;
        if (refl != reflected) continue;
        const auto* e = s.by_instance(id);
        if (e && !e->is_mirror && e->label == label) ids.insert(id);
    }
    return ids.size();
}

/// Two cups in direct view and one behind the agent, seen only in the mirror.
sim::Scene mirror_scene()
{
    sim::Scene s = fixtures::room(6, 6);
    sim::SceneEntity m = fixtures::box("mirror_01", "mirror", {{5.97, 2.0, 0.5}, {6.0, 4.0, 2.5}}, "silver");
    m.is_mirror = true;
    m.mirror_plane = sim::MirrorPlane{{5.97, 3.0, 1.5}, {-1, 0, 0}, {0, 1, 0}, {0, 0, 1}, 1.0, 1.0};
    s.entities.push_back(m);
    s.entities.push_back(fixtures::box("cup_01", "cup", {{4.35, 0.75, 0.0}, {4.65, 1.05, 0.4}}, "white"));
    s.entities.push_back(fixtures::box("cup_02", "cup", {{4.35, 4.95, 0.0}, {4.65, 5.25, 0.4}}, "blue"));
    s.entities.push_back(fixtures::box("cup_03", "cup", {{0.3, 2.8, 1.3}, {0.7, 3.2, 1.7}}, "green"));
    s.agent_spawn = fixtures::pose({2.0, 3.0, 0});
    return s;
}

struct CountingSolver final : harness::Solver {
    int answers = 0, acts = 0, begins = 0;
    AttributeValue answer(const TaskInstance&, const sim::ObservationRecord&) override
    {
        ++answers;
        return Unbound{};
    }
    void begin_episode(const TaskInstance&) override { ++begins; }
    harness::NavAction act(const TaskInstance&, const sim::ObservationRecord&, const harness::NavContext&) override
    {
        ++acts;
        return {0, 0, true};
    }
};

gen::DataSet spawn_data(const sim::Scene& s)
{
    gen::DataSet d;
    d.records.push_back(sim::render(s, s.agent_spawn, sim::View::ego, 0));
    d.records.push_back(sim::render(s, s.surveillance_pose, sim::View::surveillance, 1));
    return d;
}

Errc code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return Errc::precondition;
}

} // namespace

TEST_SUITE("gen") {

TEST_CASE("2 real cups and 1 reflected cup: embodied 2, mirror 1")
{
    const sim::Scene s = mirror_scene();
    REQUIRE(sim::validate_scene(s).empty());
    const auto rec = fixtures::spawn_view(s);
    REQUIRE(raster_count(s, rec, "cup", false) == 2);
    REQUIRE(raster_count(s, rec, "cup", true) == 1);
    Rng rng(3);
    const auto emb = gen::g_embodied_count(rec, s, rng);
    CHECK(emb.ground_truth == AttributeValue{Count{2}});
    const auto mir = gen::g_mirror_count(rec, s, rng);
    CHECK(mir.ground_truth == AttributeValue{Count{1}});
    CHECK(gen::count_direct_label(s, rec, "cup") == raster_count(s, rec, "cup", false));
    CHECK(gen::count_reflected_label(s, rec, "cup") == raster_count(s, rec, "cup", true));
}

TEST_CASE("three chairs in view count to 3")
{
    sim::Scene s = fixtures::room();
    for (int i = 0; i < 3; ++i) {
        const double y = 4.0 + 1.0 * i;
        s.entities.push_back(fixtures::box("chair_0" + std::to_string(i), "chair", {{4.0, y, 0}, {4.5, y + 0.5, 1.0}}));
    }
    Rng rng(1);
    const auto inst = gen::g_embodied_count(fixtures::spawn_view(s), s, rng);
    CHECK(inst.ground_truth == AttributeValue{Count{3}});
}

TEST_CASE("no mirror in the scene: mirror count 0; absent colour counts 0")
{
    const sim::Scene s = fixtures::table_scene();
    const auto rec = fixtures::spawn_view(s);
    Rng rng(2);
    CHECK(gen::g_mirror_count(rec, s, rng).ground_truth == AttributeValue{Count{0}});
    CHECK(gen::count_direct_color(s, rec, "purple") == 0);
}

TEST_CASE("embodied counting on an empty view raises NoEligibleLabel")
{
    const sim::Scene s = fixtures::room();
    Rng rng(0);
    CHECK(code_of([&] { gen::g_embodied_count(fixtures::spawn_view(s), s, rng); }) == Errc::no_eligible_label);
    CHECK(code_of([&] { gen::g_classification(fixtures::spawn_view(s), s, rng); }) == Errc::no_visible_entity);
    CHECK(code_of([&] { gen::g_relationship(fixtures::spawn_view(s), s, rng); }) == Errc::no_entity_pair);
}

TEST_CASE("classification of table_01 answers table")
{
    sim::Scene s = fixtures::room();
    s.entities.push_back(fixtures::box("table_01", "table", {{3.5, 4.4, 0}, {4.5, 5.6, 0.75}}, "brown"));
    Rng rng(4);
    const auto inst = gen::g_classification(fixtures::spawn_view(s), s, rng);
    CHECK(inst.scene_binding.at(vid::v0) == "table_01");
    CHECK(inst.ground_truth == AttributeValue{Label{"table"}});
}

TEST_CASE("localization truth is the tight box of the entity's pixels")
{
    const sim::Scene s = fixtures::table_scene();
    const auto rec = fixtures::spawn_view(s);
    Rng root(9);
    for (int i = 0; i < 10; ++i) {
        Rng rng = root.substream(static_cast<std::uint64_t>(i));
        const auto inst = gen::g_localization(rec, s, rng);
        const std::string id = inst.scene_binding.at(vid::v1);
        const std::uint32_t want = s.instance_of(id);
        int u0 = 1 << 30, v0 = 1 << 30, u1 = -1, v1 = -1;
        for (int y = 0; y < rec.raster.height; ++y) {
            for (int x = 0; x < rec.raster.width; ++x) {
                const auto k = static_cast<std::size_t>(y * rec.raster.width + x);
                if (rec.raster.instance[k] != want || rec.raster.mirror[k] == sim::kMirrorReflection) continue;
                u0 = std::min(u0, x);
                v0 = std::min(v0, y);
                u1 = std::max(u1, x + 1);
                v1 = std::max(v1, y + 1);
            }
        }
        CHECK(inst.ground_truth == AttributeValue{BBox2D{PixelBox{u0, v0, u1, v1}}});
    }
}

TEST_CASE("depth of a face 2 m ahead is 2")
{
    sim::Scene s = fixtures::room();
    s.entities.push_back(fixtures::box("cube_01", "cube", {{3.0, 4.5, 1.1}, {4.0, 5.5, 2.1}}));
    Rng rng(0);
    const auto inst = gen::g_depth(fixtures::spawn_view(s), s, rng);
    const auto* d = std::get_if<Depth>(&inst.ground_truth);
    REQUIRE(d != nullptr);
    // Planar depth: every pixel of the facing side is exactly 2 m deep.
    CHECK(d->value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("relationship rules: on, below, left-of")
{
    sim::Scene s = fixtures::table_scene();
    const auto& pose = s.agent_spawn;
    const auto table = *s.find("table_01");
    auto cup = fixtures::box("cup_09", "cup", {{3.9, 4.9, 0.77}, {4.1, 5.1, 0.92}});
    CHECK(gen::spatial_relation(cup, table, pose) == "on");
    CHECK(gen::spatial_relation(table, cup, pose) == "below");
    auto floating = fixtures::box("lamp_01", "lamp", {{3.9, 4.9, 1.5}, {4.1, 5.1, 1.7}});
    CHECK(gen::spatial_relation(floating, table, pose) == "above");
    // +y is to the agent's left when it faces +x.
    const auto left = fixtures::box("a_01", "box", {{4.0, 6.5, 0}, {4.4, 6.9, 0.5}});
    const auto right = fixtures::box("b_01", "box", {{4.0, 3.1, 0}, {4.4, 3.5, 0.5}});
    CHECK(gen::spatial_relation(left, right, pose) == "left-of");
    CHECK(gen::spatial_relation(right, left, pose) == "right-of");
    const auto close = fixtures::box("c_01", "box", {{6.0, 5.05, 0}, {6.4, 5.45, 0.5}});
    const auto close2 = fixtures::box("d_01", "box", {{6.6, 4.95, 0}, {7.0, 5.35, 0.5}});
    CHECK(gen::spatial_relation(close, close2, pose) == "near");
}

TEST_CASE("relationship rules are antisymmetric over 200 random pairs")
{
    Rng root(21);
    const sim::Scene s = fixtures::room();
    for (int i = 0; i < 200; ++i) {
        Rng rng = root.substream(static_cast<std::uint64_t>(i));
        auto rnd_box = [&](const std::string& id) {
            const double x = rng.uniform(3, 8), y = rng.uniform(2, 8), z = rng.bernoulli(0.3) ? rng.uniform(0, 1) : 0.0;
            return fixtures::box(id, "box", {{x, y, z}, {x + rng.uniform(0.2, 1), y + rng.uniform(0.2, 1), z + rng.uniform(0.2, 1)}});
        };
        const auto a = rnd_box("a"), b = rnd_box("b");
        const std::string ab = gen::spatial_relation(a, b, s.agent_spawn);
        const std::string ba = gen::spatial_relation(b, a, s.agent_spawn);
        static const std::map<std::string, std::string> inverse{
            {"on", "below"}, {"left-of", "right-of"}, {"right-of", "left-of"}, {"near", "near"}, {"above", "below"}};
        if (ab == "below") {
            CHECK((ba == "on" || ba == "above"));
        } else {
            REQUIRE(inverse.count(ab));
            CHECK(ba == inverse.at(ab));
        }
    }
}

TEST_CASE("in-view: an entity behind the agent is not visible")
{
    sim::Scene s = fixtures::table_scene();
    s.entities.push_back(fixtures::box("sofa_01", "sofa", {{0.1, 8.0, 0}, {0.8, 9.5, 0.9}}, "green"));
    const auto rec = fixtures::spawn_view(s); // facing +x, the sofa is behind-left
    const auto inst = gen::ground(canonical_template(TaskType::in_view_check), s, rec, {{vid::v0, "agent"}, {vid::v1, "sofa_01"}});
    CHECK(inst.ground_truth == AttributeValue{AnswerBool{false}});
    const auto seen = gen::ground(canonical_template(TaskType::in_view_check), s, rec, {{vid::v0, "agent"}, {vid::v1, "table_01"}});
    CHECK(seen.ground_truth == AttributeValue{AnswerBool{true}});
}

TEST_CASE("navigation: target 5 m away is reachable by the oracle in 10 steps")
{
    sim::Scene s = fixtures::room();
    s.entities.push_back(fixtures::box("sofa_01", "sofa", {{6.0, 4.2, 0}, {7.0, 5.8, 0.9}}, "green"));
    const auto rec = fixtures::spawn_view(s);
    CHECK(footprint_distance(s.agent_spawn.position, s.entities[0].bbox3d) == doctest::Approx(5.0));
    CHECK(gen::navigation_feasible(s, s.agent_spawn, s.entities[0]));
    Rng rng(1);
    const auto inst = gen::g_navigation(rec, s, rng, gen::NavMode::label);
    CHECK(inst.ground_truth == AttributeValue{Label{"sofa_01"}});
    REQUIRE(inst.nav_goal.has_value());
    CHECK(inst.nav_goal->success_radius == 1.0);
    CHECK(inst.nav_goal->max_steps == 10);
    CHECK(inst.prompt.find("sofa") != std::string::npos);
    const auto pic = gen::g_navigation(rec, s, rng, gen::NavMode::picture);
    CHECK(pic.type() == TaskType::picture_navigation);
    const Vertex* o = pic.task.initial.find(vid::v1);
    REQUIRE(o != nullptr);
    CHECK(o->attributes.count(slot::image_ref) == 1);
    CHECK(o->attributes.count(slot::label) == 0);
}

TEST_CASE("navigation: a target within 1 m of the spawn is rejected")
{
    sim::Scene s = fixtures::room();
    s.entities.push_back(fixtures::box("sofa_01", "sofa", {{1.6, 4.2, 0}, {2.4, 5.8, 0.9}}, "green"));
    Rng rng(1);
    CHECK(code_of([&] { gen::g_navigation(fixtures::spawn_view(s), s, rng, gen::NavMode::label); }) ==
          Errc::no_distant_target);
}

TEST_CASE("generate_tasks: empty data set is a precondition error")
{
    const sim::Scene s = fixtures::table_scene();
    CHECK(code_of([&] { gen::generate_tasks({}, gen::GeneratorRegistry::defaults(), s, {}); }) == Errc::precondition);
}

TEST_CASE("generate_tasks: every instance re-derives its ground truth (10 scenes)")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const sim::Scene s = sim::generate_scene(seed);
        harness::OracleSolver oracle(s);
        gen::LoopConfig c;
        c.seed = seed;
        const auto loops = gen::run_loop(s, gen::GeneratorRegistry::defaults(), c, 2, &oracle);
        std::size_t n = 0, ok = 0;
        for (const auto& l : loops) {
            for (const auto& t : l.tasks) {
                ++n;
                const auto rec = gen::rerender(s, t);
                CHECK(rec == *l.data.find(t.record_id));
                ok += gen::derive_ground_truth(t, s, rec) == t.ground_truth ? 1 : 0;
            }
        }
        CHECK(n > 0);
        CHECK(ok == n);
    }
}

TEST_CASE("generate_tasks is monotone in the data")
{
    const sim::Scene s = sim::generate_scene(4);
    gen::LoopConfig c;
    c.seed = 4;
    const auto full = gen::receive({}, nullptr, s, c, 0).data;
    REQUIRE(full.records.size() > 4);
    gen::DataSet head = full;
    head.records.resize(full.records.size() / 2);
    const auto reg = gen::GeneratorRegistry::defaults();
    auto strip = [](std::vector<TaskInstance> v) {
        std::set<std::string> out;
        for (auto& t : v) {
            t.id.clear();
            out.insert(tasks_to_jsonl({t}));
        }
        return out;
    };
    const auto a = strip(gen::generate_tasks(head, reg, s, c));
    const auto b = strip(gen::generate_tasks(full, reg, s, c));
    CHECK(a.size() < b.size());
    for (const auto& x : a) CHECK(b.count(x) == 1);
}

TEST_CASE("duplicate suppression keys on type, binding and binned pose")
{
    const sim::Scene s = fixtures::table_scene();
    gen::DataSet d;
    auto p = s.agent_spawn;
    d.records.push_back(sim::render(s, p, sim::View::ego, 0));
    p.position.x += 0.05; // same 0.5 m bin
    d.records.push_back(sim::render(s, p, sim::View::ego, 1));
    gen::LoopConfig c;
    c.enabled_generators = {TaskType::depth_estimation};
    const auto reg = gen::GeneratorRegistry::defaults();
    const auto dedup = gen::generate_tasks(d, reg, s, c);
    c.deduplicate = false;
    const auto all = gen::generate_tasks(d, reg, s, c);
    CHECK(all.size() == 2);
    std::set<gen::DedupKey> keys;
    for (const auto& t : all) keys.insert(gen::dedup_key(t));
    CHECK(dedup.size() == keys.size());
}

TEST_CASE("receive: epsilon 1 explores without tasks and never calls the solver")
{
    const sim::Scene s = sim::generate_scene(2);
    CountingSolver stub;
    gen::LoopConfig c;
    c.epsilon = 1.0;
    c.seed = 2;
    const auto r = gen::receive({}, &stub, s, c, 0);
    CHECK_FALSE(r.data.empty());
    CHECK(r.stats.explored);
    CHECK(r.data.records.size() == static_cast<std::size_t>(c.walk_steps + 2));
    gen::validate_dataset(r.data);
    const auto loops = gen::run_loop(s, gen::GeneratorRegistry::defaults(), [] {
        gen::LoopConfig x;
        x.epsilon_schedule = {1.0};
        return x;
    }(), 1, &stub);
    CHECK(loops.size() == 1);
    CHECK(stub.answers + stub.acts + stub.begins == 0);
}

TEST_CASE("receive: epsilon 0 without interactive tasks gives empty data")
{
    const sim::Scene s = sim::generate_scene(2);
    CountingSolver stub;
    gen::LoopConfig c;
    c.epsilon = 0.0;
    CHECK(gen::receive({}, &stub, s, c, 0).data.empty());
}

TEST_CASE("receive is deterministic per seed")
{
    const sim::Scene s = sim::generate_scene(3);
    gen::LoopConfig c;
    c.seed = 17;
    const auto a = gen::receive({}, nullptr, s, c, 0).data.records;
    const auto b = gen::receive({}, nullptr, s, c, 0).data.records;
    CHECK(a == b);
}

TEST_CASE("run_loop with schedule 1,0 yields nonempty tau and tau'")
{
    const sim::Scene s = sim::generate_scene(1);
    harness::OracleSolver oracle(s);
    gen::LoopConfig c;
    c.seed = 7;
    const auto loops = gen::run_loop(s, gen::GeneratorRegistry::defaults(), c, 2, &oracle);
    REQUIRE(loops.size() == 2);
    CHECK(loops[0].epsilon == 1.0);
    CHECK(loops[1].epsilon == 0.0);
    CHECK_FALSE(loops[0].tasks.empty());
    CHECK_FALSE(loops[1].tasks.empty());
    CHECK(loops[0].filtered.representatives.size() <= 5u);
    // Loop 1 executes exactly the loop-0 representatives.
    CHECK(loops[1].stats.episodes == static_cast<int>(loops[0].filtered.representatives.size()));
    // Growth bound: records <= carried tasks x (step cap + 1), instances <= records x generators.
    const std::size_t carried = loops[0].filtered.representatives.size();
    CHECK(loops[1].data.records.size() <= carried * static_cast<std::size_t>(c.max_steps_per_task + 1));
    CHECK(loops[1].tasks.size() <= loops[1].data.records.size() * c.enabled_generators.size());
    for (const auto& t : loops[1].tasks) CHECK(t.id.rfind("l1_", 0) == 0);
}

TEST_CASE("run_loop: seeds 1..5 give distinct, reproducible tau")
{
    const sim::Scene s = sim::generate_scene(6);
    std::set<std::string> seen;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        gen::LoopConfig c;
        c.seed = seed;
        c.epsilon_schedule = {1.0};
        const auto a = tasks_to_jsonl(gen::run_loop(s, gen::GeneratorRegistry::defaults(), c, 1, nullptr)[0].tasks);
        const auto b = tasks_to_jsonl(gen::run_loop(s, gen::GeneratorRegistry::defaults(), c, 1, nullptr)[0].tasks);
        CHECK(a == b);
        seen.insert(a);
    }
    CHECK(seen.size() == 5);
}

TEST_CASE("config and data validation")
{
    gen::LoopConfig c;
    c.epsilon = 1.5;
    CHECK(code_of([&] { gen::validate_loop_config(c); }) == Errc::precondition);
    c.epsilon = 0.5;
    c.filter_k = 0;
    CHECK(code_of([&] { gen::validate_loop_config(c); }) == Errc::precondition);
    gen::DataSet d;
    d.records.resize(2);
    d.records[0].timestamp = 3;
    d.records[1].timestamp = 3;
    CHECK(code_of([&] { gen::validate_dataset(d); }) == Errc::precondition);
    auto reg = gen::GeneratorRegistry::defaults();
    reg.rule_based.erase(TaskType::depth_estimation);
    CHECK(code_of([&] { reg.check_covers(gen::all_generated_types()); }) == Errc::precondition);
}

TEST_CASE("per-step epsilon mode replaces solver steps and stays reproducible")
{
    const sim::Scene s = sim::generate_scene(1);
    harness::OracleSolver oracle(s);
    gen::LoopConfig c;
    c.seed = 3;
    c.epsilon_mode = gen::EpsilonMode::per_step;
    c.epsilon_schedule = {1.0, 0.5};
    const auto a = gen::run_loop(s, gen::GeneratorRegistry::defaults(), c, 2, &oracle);
    const auto b = gen::run_loop(s, gen::GeneratorRegistry::defaults(), c, 2, &oracle);
    CHECK(tasks_to_jsonl(a[1].tasks) == tasks_to_jsonl(b[1].tasks));
}

} // TEST_SUITE
