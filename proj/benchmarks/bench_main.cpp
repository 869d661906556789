#include <defence/gabor.hpp>
#include <defence/hog.hpp>
#include <defence/image.hpp>
#include <defence/motion.hpp>
#include <defence/operators.hpp>
#include <defence/solver.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace defence;

namespace {

ImagePlane noise(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 255);
    ImagePlane p(w, h);
    for (double& v : p.values()) v = u(rng);
    return p;
}

void BM_GaussianBlur(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ImagePlane img = noise(n, n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_blur(img, 1.5));
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_GaussianBlur)->Arg(128)->Arg(256);

void BM_WarpForwardAdjoint(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ImagePlane img = noise(n, n, 2);
    const FlowField flow = FlowField::constant(n, n, 3.3, -1.7);
    const BilinearWarp warp(flow);
    std::vector<double> out(img.size()), back(img.size());
    for (auto _ : state) {
        warp.forward(img.values(), out);
        warp.adjoint(out, back);
        benchmark::DoNotOptimize(back.data());
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_WarpForwardAdjoint)->Arg(128)->Arg(256);

void BM_BregmanStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<FrameObservation> obs;
    for (int m = 0; m < 4; ++m) {
        obs.push_back({noise(n, n, 10 + m), FenceMask(n, n), FlowField::constant(n, n, m * 2.0, -m * 1.0), std::nullopt});
    }
    SplitBregman solver(obs, SolverParams{}, BregmanState::start(noise(n, n, 3)));
    for (auto _ : state) benchmark::DoNotOptimize(solver.step());
}
BENCHMARK(BM_BregmanStep)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_HogWindow(benchmark::State& state) {
    const ImagePlane win = noise(96, 104, 4);
    for (auto _ : state) benchmark::DoNotOptimize(hog(win));
}
BENCHMARK(BM_HogWindow);

void BM_GaborDetect(benchmark::State& state) {
    const ImagePlane img = noise(256, 256, 5);
    GaborDetectOptions opts;
    opts.thetas_deg = {0.0, 90.0};
    for (auto _ : state) benchmark::DoNotOptimize(detect_fence_gabor(img, opts));
}
BENCHMARK(BM_GaborDetect)->Unit(benchmark::kMillisecond);

void BM_HornSchunck(benchmark::State& state) {
    const ImagePlane ref = gaussian_blur(noise(128, 128, 6), 2.0);
    const ImagePlane tgt = gaussian_blur(noise(128, 128, 6), 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_flow(ref, tgt));
}
BENCHMARK(BM_HornSchunck)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
