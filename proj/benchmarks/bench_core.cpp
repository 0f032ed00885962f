// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "targetfill/denoiser.hpp"
#include "targetfill/mask.hpp"
#include "targetfill/pipeline.hpp"
#include "targetfill/timestep_plan.hpp"

namespace {

using namespace targetfill;

Mask random_mask(int size, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::bernoulli_distribution hole(0.6);
    std::vector<std::uint8_t> v(static_cast<std::size_t>(size) * size);
    for (auto& x : v) x = hole(gen) ? 0 : 1;
    v[0] = 1;
    return Mask(size, size, std::move(v));
}

Mask square_hole(int size) {
    std::vector<std::uint8_t> v(static_cast<std::size_t>(size) * size, 1);
    for (int y = size / 4; y < 3 * size / 4; ++y)
        for (int x = size / 4; x < 3 * size / 4; ++x) v[static_cast<std::size_t>(y) * size + x] = 0;
    return Mask(size, size, std::move(v));
}

void BM_DistanceTransform(benchmark::State& state) {
    const auto mask = random_mask(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(distance_transform(mask));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_DistanceTransform)->Arg(32)->Arg(256)->Arg(1024);

void BM_DilateHole(benchmark::State& state) {
    const auto mask = square_hole(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(dilate_hole(mask, 8));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_DilateHole)->Arg(64)->Arg(256);

void BM_ReverseStep(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const Shape shape{3, size, size};
    const auto sched = make_linear_schedule(200);
    AnalyticGaussianDenoiser d(shape, 0.0, 0.25, sched);
    const auto x = gaussian_draw(shape, Substream{1, purpose_id("bench"), 0, 0});
    std::uint64_t counter = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(reverse_step(d, x, 100, sched, Substream{1, purpose_id("ddpm"), 100, counter++}));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(shape.size()));
}
BENCHMARK(BM_ReverseStep)->Arg(32)->Arg(128);

void BM_ComposeBinary(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const Shape shape{3, size, size};
    const auto a = gaussian_draw(shape, Substream{1, 1, 0, 0});
    const auto b = gaussian_draw(shape, Substream{1, 2, 0, 0});
    const auto c = gaussian_draw(shape, Substream{1, 3, 0, 0});
    const auto mask = square_hole(size);
    for (auto _ : state) benchmark::DoNotOptimize(compose_binary(a, b, c, mask, 0.7));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(shape.size()));
}
BENCHMARK(BM_ComposeBinary)->Arg(32)->Arg(128);

void BM_Run(benchmark::State& state) {
    const int T = static_cast<int>(state.range(0));
    const Shape shape{3, 32, 32};
    const ImageTensor scene(shape, 0.2f);
    const ImageTensor target(shape, -0.4f);
    const auto mask = square_hole(32);
    AnalyticGaussianDenoiser d(shape, 0.0, 0.25, make_linear_schedule(T));
    SamplerConfig cfg;
    cfg.timesteps = T;
    cfg.jump = 10;
    cfg.resample = 10;
    for (auto _ : state) benchmark::DoNotOptimize(run(scene, target, mask, cfg, d));
    state.counters["denoiser_calls"] = static_cast<double>(denoiser_call_count(T, 10, 10));
}
BENCHMARK(BM_Run)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
