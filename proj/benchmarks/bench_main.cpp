#include <benchmark/benchmark.h>

#include <random>

#include "amcp/amcp.hpp"
#include "amcp/clustering.hpp"
#include "amcp/eval.hpp"
#include "amcp/geometry.hpp"
#include "amcp/morphology.hpp"
#include "amcp/potential.hpp"

using namespace amcp;

namespace {

BitMask blob_mask(int side) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution bit(0.5);
  BitMask m(side, side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) m.set(x, y, bit(rng));
  }
  return m;
}

const GeneratedScene& scene() {
  static const GeneratedScene s = [] {
    SceneOptions o;
    o.noise_sigma = 0.05;
    return gen_scenes(1, 7, o).front();
  }();
  return s;
}

}  // namespace

static void BM_Dilate(benchmark::State& state) {
  const BitMask m = blob_mask(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dilate(m, 16));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(m.size()));
}
BENCHMARK(BM_Dilate)->Arg(128)->Arg(512);

static void BM_Rings(benchmark::State& state) {
  const BitMask m = scene().spec.gt;
  for (auto _ : state) benchmark::DoNotOptimize(rings(m, 32));
}
BENCHMARK(BM_Rings);

static void BM_KMeans1D(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (auto& x : v) x = u(rng);
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kmeans_1d(v, k));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KMeans1D)->Args({4096, 2})->Args({4096, 3})->Args({65536, 3});

static void BM_PhiColor(benchmark::State& state) {
  const auto& s = scene();
  const Rect roi = bbox_of(s.spec.gt, 1.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi_color(s.image, s.spec.gt, roi, 5, 3));
  }
}
BENCHMARK(BM_PhiColor)->Unit(benchmark::kMillisecond);

static void BM_InpaintStep(benchmark::State& state) {
  const auto& s = scene();
  const OraclePainter painter(s.spec);
  const IdentityProjector projector;
  AmcpConfig config;
  config.n_samples = static_cast<int>(state.range(0));
  config.threads = 1;
  const BitMask box = init_mask(s.prompts.box, s.spec.width, s.spec.height);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_step(s.image, box, StepKind::kInpaint, 0, config, painter,
                                      projector, s.prompts.box));
  }
}
BENCHMARK(BM_InpaintStep)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
