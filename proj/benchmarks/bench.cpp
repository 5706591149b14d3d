#include <benchmark/benchmark.h>

#include <random>

#include "depthkit/lidar_depth.hpp"
#include "depthkit/stereo.hpp"
#include "depthkit/synth.hpp"
#include "depthkit/wls.hpp"

using namespace depthkit;

namespace {

RenderedScene make_scene(int h, int w) {
  const CameraIntrinsics intr = CameraIntrinsics::centered(500.0, h, w, 0.3);
  SceneSpec spec;
  spec.background_depth = intr.focal * intr.baseline / 8.0;
  spec.rects.push_back({w / 4, h / 4, 3 * w / 4, 3 * h / 4,
                        intr.focal * intr.baseline / 16.0, 1});
  spec.seed = 1;
  return render_scene(spec, intr);
}

SparseDepthMap make_sparse(int h, int w, double fill) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> depth(1.0, 60.0);
  std::uniform_real_distribution<double> drop(0.0, 1.0);
  SparseDepthMap map(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (drop(rng) < fill) map.set(y, x, depth(rng));
    }
  }
  return map;
}

void bm_sad_cost_volume(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RenderedScene scene = make_scene(n, n);
  MatchParams p;
  p.num_disparities = 64;
  p.block_size = 9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sad_cost_volume(scene.left, scene.right, p));
  }
  state.SetItemsProcessed(state.iterations() * n * n * p.num_disparities);
}
BENCHMARK(bm_sad_cost_volume)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_sgm_aggregate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RenderedScene scene = make_scene(n, n);
  MatchParams p;
  p.num_disparities = 64;
  p.block_size = 9;
  const CostVolume cost = sad_cost_volume(scene.left, scene.right, p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sgm_aggregate(cost, p));
  }
  state.SetItemsProcessed(state.iterations() * n * n * p.num_disparities);
}
BENCHMARK(bm_sgm_aggregate)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_complete(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SparseDepthMap map = make_sparse(n, n, 0.2);
  CompletionParams p;
  for (auto _ : state) {
    benchmark::DoNotOptimize(complete(map, p));
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(bm_complete)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_wls_filter(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RenderedScene scene = make_scene(n, n);
  MatchParams mp;
  mp.num_disparities = 32;
  mp.block_size = 7;
  const DisparityMap disp =
      bm_match(sad_cost_volume(scene.left, scene.right, mp), mp);
  WlsParams wp;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wls_filter(disp, scene.left, wp));
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(bm_wls_filter)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
