#include <doctest.h>

#include <httplib.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "fixtures.hpp"
#include "insitu/cli/pipeline.hpp"
#include "insitu/core/error.hpp"
#include "insitu/core/rng.hpp"
#include "insitu/filter/filter.hpp"
#include "insitu/gen/loop.hpp"
#include "insitu/harness/solver.hpp"
#include "insitu/sim/scene_gen.hpp"

using namespace insitu;
using namespace insitu::filter;
using task::TaskInstance;

namespace {

/// Fixed vectors looked up by task id; missing ids have no feature.
class TableEncoder final : public Encoder {
public:
    TableEncoder(std::string name, std::map<std::string, std::vector<double>> table)
        : name_(std::move(name)), table_(std::move(table))
    {
    }
    std::string name() const override { return name_; }
    std::size_t dim() const override { return table_.begin()->second.size(); }
    std::optional<std::vector<double>> encode(const TaskInstance& inst) const override
    {
        auto it = table_.find(inst.id);
        if (it == table_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::string name_;
    std::map<std::string, std::vector<double>> table_;
};

std::vector<TaskInstance> named(std::initializer_list<const char*> ids)
{
    std::vector<TaskInstance> out;
    for (const char* id : ids) {
        TaskInstance t;
        t.id = id;
        out.push_back(t);
    }
    return out;
}

EncoderSet table(std::map<std::string, std::vector<double>> a)
{
    return {std::make_shared<TableEncoder>("m1", std::move(a))};
}

SimilarityMatrix planted(const std::vector<int>& block, double within, double across)
{
    const std::size_t n = block.size();
    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) rows[i][j] = i == j ? 1.0 : block[i] == block[j] ? within : across;
    }
    return SimilarityMatrix::from_rows(rows);
}

/// Same partition up to relabeling.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            if ((a[i] == a[j]) != (b[i] == b[j])) return false;
        }
    }
    return true;
}

std::vector<TaskInstance> scene_tasks(std::uint64_t seed, gen::DataSet* data = nullptr)
{
    const sim::Scene s = sim::generate_scene(seed);
    gen::LoopConfig c;
    c.seed = seed;
    c.epsilon_schedule = {1.0};
    auto loops = gen::run_loop(s, gen::GeneratorRegistry::defaults(), c, 1, nullptr);
    if (data) *data = loops[0].data;
    return loops[0].tasks;
}

} // namespace

TEST_SUITE("filter") {

TEST_CASE("similarity: self 1, orthogonal 0")
{
    const auto t = named({"a", "b"});
    const auto s = similarity(t, table({{"a", {1, 0, 0}}, {"b", {0, 3, 0}}}));
    CHECK(s(0, 0) == 1.0);
    CHECK(s(1, 1) == 1.0);
    CHECK(s(0, 1) == doctest::Approx(0.0));
    CHECK(s.modality_count == 1);
}

TEST_CASE("similarity: cosines 0.6 and 0.8 average to 0.7")
{
    const auto t = named({"a", "b"});
    EncoderSet enc{std::make_shared<TableEncoder>("m1", std::map<std::string, std::vector<double>>{{"a", {1, 0}}, {"b", {3, 4}}}),
                   std::make_shared<TableEncoder>("m2", std::map<std::string, std::vector<double>>{{"a", {2, 0}}, {"b", {4, 3}}})};
    const auto s = similarity(t, enc);
    CHECK(s(0, 1) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(s(1, 0) == s(0, 1));
}

TEST_CASE("similarity: modality missing on both sides is dropped, on one side counts 0")
{
    const auto t = named({"a", "b", "c"});
    EncoderSet enc{std::make_shared<TableEncoder>("m1", std::map<std::string, std::vector<double>>{{"a", {1, 0}}, {"b", {3, 4}}, {"c", {0, 1}}}),
                   std::make_shared<TableEncoder>("m2", std::map<std::string, std::vector<double>>{{"c", {1, 1}}})};
    const auto s = similarity(t, enc);
    CHECK(s(0, 1) == doctest::Approx(0.6).epsilon(1e-12)); // m2 absent on both
    CHECK(s(1, 2) == doctest::Approx(0.4).epsilon(1e-12)); // (0.8 + 0) / 2
}

TEST_CASE("similarity: all-zero feature raises ZeroVector")
{
    const auto t = named({"a", "b"});
    try {
        similarity(t, table({{"a", {0, 0}}, {"b", {1, 0}}}));
        FAIL("expected ZeroVector");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::zero_vector);
    }
}

TEST_CASE("similarity on scene tasks: symmetric, unit diagonal, bounded, permutation-equivariant")
{
    gen::DataSet d;
    auto tasks = scene_tasks(3, &d);
    REQUIRE(tasks.size() > 20);
    const sim::Scene s = sim::generate_scene(3);
    const auto enc = default_encoders(s);
    const auto S = similarity(tasks, enc);
    for (std::size_t i = 0; i < S.n; ++i) {
        CHECK(std::abs(S(i, i) - 1.0) <= 1e-9);
        for (std::size_t j = 0; j < S.n; ++j) {
            CHECK(S(i, j) == S(j, i));
            CHECK(S(i, j) >= -1.0);
            CHECK(S(i, j) <= 1.0);
        }
    }
    std::vector<std::size_t> perm(tasks.size());
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(4);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
    std::vector<TaskInstance> shuffled;
    for (auto p : perm) shuffled.push_back(tasks[p]);
    const auto P = similarity(shuffled, enc);
    for (std::size_t i = 0; i < S.n; ++i) {
        for (std::size_t j = 0; j < S.n; ++j) CHECK(P(i, j) == S(perm[i], perm[j]));
    }
    // Rasters from the records, or re-rendered from the pose: same features.
    const auto lookup = [&d](const TaskInstance&, const std::string& id) { return d.find(id); };
    CHECK(similarity(tasks, default_encoders(s, lookup)) == S);
}

TEST_CASE("parallel similarity kernel is bit-identical to the serial one")
{
    const auto tasks = scene_tasks(5);
    const sim::Scene s = sim::generate_scene(5);
    const auto f = encode_all(tasks, default_encoders(s));
    CHECK(similarity_from_features(f) == similarity_from_features_serial(f));
}

TEST_CASE("similarity file round trip and header check")
{
    const auto tasks = scene_tasks(2);
    const sim::Scene s = sim::generate_scene(2);
    const auto S = similarity(tasks, default_encoders(s));
    const auto dir = std::filesystem::temp_directory_path() / "insitu_sim_test";
    std::filesystem::create_directories(dir);
    std::vector<std::string> ids;
    for (const auto& t : tasks) ids.push_back(t.id);
    write_similarity(dir / "S.bin", S, ids);
    std::vector<std::string> back;
    CHECK(read_similarity(dir / "S.bin", &back) == S);
    CHECK(back == ids);
    write_file(dir / "bad.bin", "{\"schema\":\"insitu.similarity\",\"schema_version\":7}\n");
    try {
        read_similarity(dir / "bad.bin");
        FAIL("expected schema rejection");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::schema_version);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("spectral_cluster: k = n gives singletons, k = 1 one cluster, bad k throws")
{
    const auto S = planted({0, 0, 1, 1, 2}, 0.9, 0.1);
    const auto all = spectral_cluster(S, 5);
    CHECK(std::set<int>(all.labels.begin(), all.labels.end()).size() == 5);
    const auto one = spectral_cluster(S, 1);
    CHECK(std::set<int>(one.labels.begin(), one.labels.end()) == std::set<int>{0});
    CHECK_THROWS_AS(spectral_cluster(S, 0), Error);
    CHECK_THROWS_AS(spectral_cluster(S, 6), Error);
}

TEST_CASE("spectral_cluster recovers planted partitions")
{
    Rng root(12);
    for (int trial = 0; trial < 30; ++trial) {
        Rng rng = root.substream(static_cast<std::uint64_t>(trial));
        const int k = 2 + static_cast<int>(rng.below(3));
        std::vector<int> block;
        for (int b = 0; b < k; ++b) {
            const int size = 2 + static_cast<int>(rng.below(6));
            for (int i = 0; i < size; ++i) block.push_back(b);
        }
        for (std::size_t i = block.size(); i > 1; --i) std::swap(block[i - 1], block[rng.index(i)]);
        ClusterConfig cc;
        cc.seed = rng.next();
        const auto r = spectral_cluster(planted(block, 0.95, 0.05), k, cc);
        CHECK(same_partition(r.labels, block));
    }
}

TEST_CASE("spectral_cluster: two blocks 0.95 / 0.05 split exactly")
{
    const std::vector<int> block{0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
    const auto r = spectral_cluster(planted(block, 0.95, 0.05), 2);
    CHECK(same_partition(r.labels, block));
}

TEST_CASE("spectral_cluster: deterministic per seed, labels partition [0, k)")
{
    const auto tasks = scene_tasks(4);
    const sim::Scene s = sim::generate_scene(4);
    const auto S = similarity(tasks, default_encoders(s));
    ClusterConfig cc;
    cc.seed = 99;
    const auto a = spectral_cluster(S, 5, cc);
    const auto b = spectral_cluster(S, 5, cc);
    CHECK(a.labels == b.labels);
    CHECK(std::set<int>(a.labels.begin(), a.labels.end()) == std::set<int>{0, 1, 2, 3, 4});
}

TEST_CASE("spectral_cluster: an isolated task gets its own cluster and a note")
{
    auto S = planted({0, 0, 0, 1, 1, 1, 2}, 0.9, 0.1);
    for (std::size_t j = 0; j < S.n; ++j) {
        if (j != 6) S(6, j) = S(j, 6) = -0.2;
    }
    const auto r = spectral_cluster(S, 3);
    CHECK(r.degenerate == std::vector<std::size_t>{6});
    CHECK_FALSE(r.notes.empty());
    CHECK(std::count(r.labels.begin(), r.labels.end(), r.labels[6]) == 1);
    CHECK(same_partition(r.labels, {0, 0, 0, 1, 1, 1, 2}));
}

TEST_CASE("select_representatives: the three-task medoid is task 1")
{
    const auto S = SimilarityMatrix::from_rows({{1, .9, .2}, {.9, 1, .3}, {.2, .3, 1}});
    // Mean similarity to the other members: 0.55, 0.60, 0.25.
    CHECK(select_representatives({"t0", "t1", "t2"}, {0, 0, 0}, S) == std::vector<std::size_t>{1});
}

TEST_CASE("select_representatives: singletons, ties to the smaller id, one per cluster")
{
    const auto S = SimilarityMatrix::from_rows({{1, .5, 0}, {.5, 1, 0}, {0, 0, 1}});
    CHECK(select_representatives({"b", "a", "c"}, {0, 0, 1}, S) == std::vector<std::size_t>{1, 2});
    const auto tasks = scene_tasks(6);
    const sim::Scene s = sim::generate_scene(6);
    const auto r = filter_tasks(tasks, 5, default_encoders(s));
    REQUIRE(r.representatives.size() == 5);
    std::set<int> clusters;
    for (auto i : r.representative_indices) clusters.insert(r.clusters.labels[i]);
    CHECK(clusters.size() == 5);
    CHECK(std::set<std::size_t>(r.representative_indices.begin(), r.representative_indices.end()).size() == 5);
}

TEST_CASE("filter_tasks: empty input, k above n")
{
    const sim::Scene s = fixtures::table_scene();
    CHECK(filter_tasks({}, 5, default_encoders(s)).representatives.empty());
    const auto t = named({"a", "b", "c"});
    const auto r = filter_tasks(t, 10, table({{"a", {1, 0}}, {"b", {0, 1}}, {"c", {1, 1}}}));
    CHECK(r.representatives.size() == 3);
}

TEST_CASE("filtered representatives are at least as diverse as tau in 9 of 10 scenes")
{
    int better = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const sim::Scene s = sim::generate_scene(seed);
        gen::DataSet d;
        auto tasks = scene_tasks(seed, &d);
        std::vector<TaskInstance> inter;
        for (const auto& t : tasks) {
            if (task::is_interactive(t.type())) inter.push_back(t);
        }
        REQUIRE(!inter.empty());
        const auto lookup = [&d](const TaskInstance&, const std::string& id) { return d.find(id); };
        const auto r = filter_tasks(inter, 5, default_encoders(s, lookup));
        const auto all = cli::task_mir(inter, s, lookup, 0.8);
        const auto kept = cli::task_mir(r.representatives, s, lookup, 0.8);
        better += kept.value() >= all.value() ? 1 : 0;
    }
    CHECK(better >= 9);
}

TEST_CASE("encoders: deterministic, fixed dimensions, nonzero for nonempty input")
{
    const auto tasks = scene_tasks(1);
    const sim::Scene s = sim::generate_scene(1);
    const auto enc = default_encoders(s);
    for (const auto& t : tasks) {
        for (const auto& e : enc) {
            const auto a = e->encode(t);
            CHECK(a == e->encode(t));
            if (!a) continue;
            CHECK(a->size() == e->dim());
            CHECK(std::any_of(a->begin(), a->end(), [](double v) { return v != 0.0; }));
        }
    }
    LabelEncoder le;
    TaskInstance blank;
    CHECK_FALSE(le.encode(blank).has_value());
    CHECK_FALSE(PromptEncoder{}.encode(blank).has_value());
}

TEST_CASE("crop histogram: label bins plus background count every pixel")
{
    const sim::Scene s = fixtures::table_scene();
    const auto rec = fixtures::spawn_view(s);
    const PixelBox box{10, 20, 110, 80};
    const auto h = crop_histogram(s, rec.raster, box);
    const double labels = std::accumulate(h.begin(), h.begin() + 32, 0.0);
    const double colors = std::accumulate(h.begin() + 32, h.begin() + 48, 0.0);
    const double depths = std::accumulate(h.begin() + 48, h.begin() + 63, 0.0);
    CHECK(labels + h[63] == 100.0 * 60.0);
    CHECK(colors == labels);
    CHECK(depths == labels);
}

TEST_CASE("remote text encoder: loopback server, dimension check, unreachable endpoint")
{
    httplib::Server srv;
    srv.Post("/encode", [](const httplib::Request& req, httplib::Response& res) {
        const auto j = json::parse(req.body);
        const std::string text = j.at("texts").at(0);
        std::vector<double> v(4, 0.0);
        for (char c : text) v[static_cast<unsigned char>(c) % 4] += 1.0;
        if (text.find("bad") != std::string::npos) v.resize(3);
        res.set_content(json{{"vectors", {v}}}.dump(), "application/json");
    });
    const int port = srv.bind_to_any_port("127.0.0.1");
    std::thread th([&] { srv.listen_after_bind(); });
    srv.wait_until_ready();
    const std::string ep = "http://127.0.0.1:" + std::to_string(port);
    RemoteTextEncoder enc(ep, "prompt", 4);
    TaskInstance t;
    t.prompt = "abcd";
    CHECK(enc.encode(t) == std::vector<double>{1, 1, 1, 1});
    t.prompt = "bad";
    try {
        enc.encode(t);
        FAIL("expected MalformedResponse");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::malformed_response);
    }
    srv.stop();
    th.join();
    t.prompt = "abcd";
    try {
        enc.encode(t);
        FAIL("expected Unreachable");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unreachable);
    }
}

} // TEST_SUITE
