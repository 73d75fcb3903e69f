#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <thread>

#include "corpus.hpp"
#include "fixtures.hpp"
#include "insitu/core/error.hpp"
#include "insitu/gen/grounding.hpp"
#include "insitu/harness/remote.hpp"
#include "insitu/harness/scoring.hpp"

using namespace insitu;
using namespace insitu::harness;
using task::TaskInstance;
using task::TaskType;

namespace {

std::vector<TaskInstance> split(const std::vector<TaskInstance>& all, bool interactive)
{
    std::vector<TaskInstance> out;
    for (const auto& t : all) {
        if (task::is_interactive(t.type()) == interactive) out.push_back(t);
    }
    return out;
}

/// Fixed action, fixed answer.
class ScriptedSolver final : public Solver {
public:
    explicit ScriptedSolver(NavAction a, task::AttributeValue answer = task::AnswerBool{true})
        : action_(a), answer_(std::move(answer))
    {
    }
    task::AttributeValue answer(const TaskInstance&, const sim::ObservationRecord&) override { return answer_; }
    NavAction act(const TaskInstance&, const sim::ObservationRecord&, const NavContext&) override { return action_; }

private:
    NavAction action_;
    task::AttributeValue answer_;
};

/// Turns around once, then keeps walking.
class RetreatSolver final : public Solver {
public:
    task::AttributeValue answer(const TaskInstance&, const sim::ObservationRecord&) override { return task::Unbound{}; }
    NavAction act(const TaskInstance&, const sim::ObservationRecord&, const NavContext& ctx) override
    {
        return {ctx.step_index == 0 ? 180.0 : 0.0, 0.25, false};
    }
};

struct Loopback {
    httplib::Server srv;
    std::thread th;
    int port = 0;
    void start()
    {
        port = srv.bind_to_any_port("127.0.0.1");
        th = std::thread([this] { srv.listen_after_bind(); });
        srv.wait_until_ready();
    }
    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port); }
    ~Loopback()
    {
        srv.stop();
        if (th.joinable()) th.join();
    }
};

TaskInstance table_nav(const sim::Scene& s, const sim::AgentPose& from)
{
    return gen::ground(task::canonical_template(TaskType::label_navigation), s, sim::render(s, from, sim::View::ego, 0),
                       {{task::vid::v0, std::string(task::kAgentBinding)}, {task::vid::v1, "table_01"}});
}

TaskInstance table_nav(const sim::Scene& s) { return table_nav(s, s.agent_spawn); }

} // namespace

TEST_SUITE("harness") {

TEST_CASE("oracle solver scores every static task correct with IoU 1")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const sim::Scene s = sim::generate_scene(seed);
        const auto tasks = split(fixtures::explore_tasks(seed), false);
        REQUIRE(tasks.size() > 20);
        OracleSolver oracle(s);
        const auto r = run_static(tasks, oracle, s);
        CHECK(r.overall.n == static_cast<int>(tasks.size()));
        CHECK(r.overall.accuracy() == 1.0);
        CHECK(r.overall.failures == 0);
        if (r.per_type.count(TaskType::localization)) CHECK(r.per_type.at(TaskType::localization).miou() == doctest::Approx(1.0));
    }
}

TEST_CASE("oracle navigation succeeds and metrics stay in range")
{
    std::vector<NavEpisode> eps;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const sim::Scene s = sim::generate_scene(seed);
        const auto nav = split(fixtures::explore_tasks(seed), true);
        OracleSolver oracle(s);
        const auto run = run_navigation(nav, oracle, s);
        for (const auto& e : run.episodes) {
            CHECK(e.success);
            CHECK(e.steps <= 10);
            CHECK(e.trajectory.size() == static_cast<std::size_t>(e.steps) + 1);
            eps.push_back(e);
        }
    }
    REQUIRE(!eps.empty());
    const auto m = compute_nav_metrics(eps);
    CHECK(m.success_rate == 1.0);
    CHECK(m.nav_gain > 0.0);
    CHECK(m.nav_gain <= 1.0);
    CHECK(m.step_number >= 0.0);
    CHECK(m.step_number <= 10.0);
    CHECK(m.target_neglect_rate >= 0.0);
    CHECK(m.lack_3d_awareness == 0.0);
    CHECK_THROWS_AS(compute_nav_metrics({}), Error);
}

TEST_CASE("motionless and retreating agents fail with the expected signals")
{
    const sim::Scene s = fixtures::table_scene();
    const auto inst = table_nav(s);
    ScriptedSolver stop({0, 0, true});
    const auto a = run_episode(s, inst, stop).episode;
    CHECK_FALSE(a.success);
    CHECK(a.steps == 0);
    CHECK(nav_gain(a) == 0.0);
    CHECK(has(a.events, NavEvent::early_termination));

    // From the open side of the room, facing the table, with 5 m behind.
    RetreatSolver back;
    const auto b = run_episode(s, table_nav(s, fixtures::pose({6.5, 5, 0}, 180)), back).episode;
    CHECK_FALSE(b.success);
    CHECK(b.steps == 10);
    CHECK(nav_gain(b) < 0.0);
    CHECK(nav_gain(b) >= -1.0);
    CHECK(b.dT > b.d0);
    CHECK(has(b.events, NavEvent::moved_away_after_seen));
    const auto m = compute_nav_metrics({a, b});
    CHECK(m.success_rate == 0.0);
    CHECK(m.target_neglect_rate == 0.5);
}

TEST_CASE("always-yes solver on in-view checks is near chance")
{
    int n = 0, right = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const sim::Scene s = sim::generate_scene(seed);
        std::vector<TaskInstance> inview;
        for (const auto& t : fixtures::explore_tasks(seed)) {
            if (t.type() == TaskType::in_view_check) inview.push_back(t);
        }
        ScriptedSolver yes({0, 0, true});
        const auto r = run_static(inview, yes, s);
        n += r.overall.n;
        right += r.overall.correct;
    }
    REQUIRE(n >= 40);
    const double acc = static_cast<double>(right) / n;
    CHECK(acc > 0.3);
    CHECK(acc < 0.7);
}

TEST_CASE("answer_correct rules")
{
    using namespace task;
    CHECK(answer_correct(TaskType::depth_estimation, Depth{2.15}, Depth{2.0}));
    CHECK_FALSE(answer_correct(TaskType::depth_estimation, Depth{2.25}, Depth{2.0}));
    double iou = 0;
    CHECK(answer_correct(TaskType::localization, BBox2D{{0, 0, 10, 10}}, BBox2D{{0, 0, 10, 10}}, &iou));
    CHECK(iou == 1.0);
    CHECK_FALSE(answer_correct(TaskType::localization, BBox2D{{0, 0, 10, 10}}, BBox2D{{5, 0, 15, 10}}, &iou));
    CHECK(iou == doctest::Approx(1.0 / 3.0));
    CHECK(answer_correct(TaskType::embodied_counting, Count{3}, Count{3}));
    CHECK_FALSE(answer_correct(TaskType::classification, Label{"cup"}, Label{"table"}));
    CHECK_FALSE(answer_correct(TaskType::classification, Count{1}, Label{"table"}));
}

TEST_CASE("episode JSON round trip and reclassification")
{
    const sim::Scene s = fixtures::table_scene();
    OracleSolver oracle(s);
    const auto ep = run_episode(s, table_nav(s), oracle).episode;
    CHECK(ep.success);
    const json j = ep;
    const auto back = j.get<NavEpisode>();
    CHECK(back == ep);
    NavEpisode re = back;
    classify_episode(re, 1.0);
    CHECK(re == ep);
}

TEST_CASE("remote solver talks to a loopback server")
{
    Loopback lb;
    lb.srv.Post("/solve", [](const httplib::Request& req, httplib::Response& res) {
        const auto j = json::parse(req.body);
        CHECK(j.contains("observation"));
        CHECK(j.contains("query"));
        res.set_content(json{{"answer", j.at("task_type") == "classification" ? json("table") : json(7)}}.dump(),
                        "application/json");
    });
    lb.srv.Post("/act", [](const httplib::Request& req, httplib::Response& res) {
        const auto j = json::parse(req.body);
        const bool last = j.at("remaining_steps").get<int>() <= 1;
        res.set_content(json{{"turn_degrees", 0.0}, {"forward_meters", 0.5}, {"terminate", last}}.dump(),
                        "application/json");
    });
    lb.start();
    const sim::Scene s = fixtures::table_scene();
    const auto rec = fixtures::spawn_view(s);
    RemoteSolver solver({lb.endpoint()});
    const auto cls = gen::ground(task::canonical_template(TaskType::classification), s, rec, {{task::vid::v0, "table_01"}});
    CHECK(solver.answer(cls, rec) == task::AttributeValue{task::Label{"table"}});
    const auto ep = run_episode(s, table_nav(s), solver).episode;
    CHECK(ep.error.empty());
    CHECK(ep.steps >= 1);
    CHECK(ep.dT < ep.d0);
}

TEST_CASE("remote solver: malformed replies, flaky servers, dead endpoints")
{
    Loopback lb;
    std::atomic<int> calls{0};
    lb.srv.Post("/solve", [&](const httplib::Request& req, httplib::Response& res) {
        const auto j = json::parse(req.body);
        if (j.at("task_type") == "depth_estimation") {
            res.set_content("not json", "text/plain");
            return;
        }
        if (calls++ < 2) {
            res.status = 503;
            return;
        }
        res.set_content(R"({"answer":"table"})", "application/json");
    });
    lb.start();
    const sim::Scene s = fixtures::table_scene();
    const auto rec = fixtures::spawn_view(s);
    const auto cls = gen::ground(task::canonical_template(TaskType::classification), s, rec, {{task::vid::v0, "table_01"}});
    const auto dep = gen::ground(task::canonical_template(TaskType::depth_estimation), s, rec, {{task::vid::v0, "table_01"}});

    RemoteConfig cfg{lb.endpoint()};
    cfg.backoff_ms = 5;
    RemoteSolver patient(cfg);
    try {
        patient.answer(dep, rec);
        FAIL("expected MalformedResponse");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::malformed_response);
    }
    CHECK(patient.answer(cls, rec) == task::AttributeValue{task::Label{"table"}});
    CHECK(calls == 3);

    calls = 0;
    cfg.retries = 1;
    RemoteSolver hasty(cfg);
    try {
        hasty.answer(cls, rec);
        FAIL("expected Unreachable");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unreachable);
        CHECK(is_solver_error(e));
    }

    cfg.endpoint = "http://127.0.0.1:1";
    cfg.retries = 0;
    RemoteSolver dead(cfg);
    CHECK_THROWS_AS(dead.answer(cls, rec), Error);
    const auto r = run_static({cls}, dead, s);
    CHECK(r.overall.failures == 1);
    CHECK(r.overall.accuracy() == 0.0);
    const auto ep = run_episode(s, table_nav(s), dead).episode;
    CHECK_FALSE(ep.success);
    CHECK_FALSE(ep.error.empty());
}

} // TEST_SUITE
