// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "insitu/core/rng.hpp"
#include "insitu/filter/similarity.hpp"
#include "insitu/sim/render.hpp"
#include "insitu/sim/scene_gen.hpp"

using namespace insitu;

namespace {

sim::AgentPose bench_pose(const sim::Scene& s, int scale)
{
    sim::AgentPose p = s.agent_spawn;
    p.camera.width *= scale;
    p.camera.height *= scale;
    return p;
}

template <sim::Raster (*Kernel)(const sim::Scene&, const sim::AgentPose&)>
void BM_Render(benchmark::State& state)
{
    const sim::Scene s = sim::generate_scene(7);
    const auto pose = bench_pose(s, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(s, pose));
    state.SetItemsProcessed(state.iterations() * pose.camera.width * pose.camera.height);
}

/// Three modalities of 64-d features, a tenth of them missing.
std::vector<filter::FeatureColumn> features(std::size_t n)
{
    Rng rng(3);
    std::vector<filter::FeatureColumn> f(3, filter::FeatureColumn(n));
    for (auto& col : f) {
        for (auto& cell : col) {
            if (rng.bernoulli(0.1)) continue;
            std::vector<double> v(64);
            for (auto& x : v) x = rng.uniform(-1.0, 1.0);
            cell = std::move(v);
        }
    }
    return f;
}

template <filter::SimilarityMatrix (*Kernel)(const std::vector<filter::FeatureColumn>&)>
void BM_Similarity(benchmark::State& state)
{
    const auto f = features(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(f));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

} // namespace

BENCHMARK(BM_Render<sim::render_raster_serial>)->Name("render/serial")->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Render<sim::render_raster>)->Name("render/omp")->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Similarity<filter::similarity_from_features_serial>)->Name("similarity/serial")->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Similarity<filter::similarity_from_features>)->Name("similarity/omp")->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
