#include <benchmark/benchmark.h>

#include "dnorm/boundary.hpp"
#include "dnorm/estimators.hpp"
#include "dnorm/io.hpp"
#include "dnorm/metrics.hpp"
#include "dnorm/synth.hpp"

namespace {

using namespace dnorm;

struct Fixture {
  SceneSpec spec;
  GroundTruthScene scene;
  NormalMap raw;

  Fixture() {
    spec.geometry = StepEdge{1.0, 1.5, 320};
    spec.noise_sigma = 0.001;
    spec.seed = 2;
    scene = render(spec, {2});
    raw = estimate_multi_direction(scene.depth, spec.intrinsics, {2});
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_ToSpherical(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(to_spherical(fixture().raw));
}
BENCHMARK(BM_ToSpherical)->Unit(benchmark::kMillisecond);

void BM_RMask(benchmark::State& state) {
  const SphericalMap sph = to_spherical(fixture().raw);
  const BoundaryMaskParams params{static_cast<MaskStrategy>(state.range(0)),
                                  default_threshold(static_cast<MaskStrategy>(state.range(0)))};
  for (auto _ : state) benchmark::DoNotOptimize(compute_r_mask(sph, params));
}
BENCHMARK(BM_RMask)
    ->Arg(static_cast<int>(MaskStrategy::kPercentile))
    ->Arg(static_cast<int>(MaskStrategy::kRobustSigma))
    ->Unit(benchmark::kMillisecond);

void BM_NormalizeOrient(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalize_orient(f.raw, f.scene.depth, f.spec.intrinsics));
  }
}
BENCHMARK(BM_NormalizeOrient)->Unit(benchmark::kMillisecond);

void BM_Compare(benchmark::State& state) {
  const Fixture& f = fixture();
  const NormalMap unit = normalize_orient(f.raw, f.scene.depth, f.spec.intrinsics);
  for (auto _ : state) benchmark::DoNotOptimize(compare(unit, f.scene.normals));
}
BENCHMARK(BM_Compare)->Unit(benchmark::kMillisecond);

void BM_EncodeDepthRaw64(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode_depth(fixture().scene.depth, DepthFormat::kRaw64));
  }
}
BENCHMARK(BM_EncodeDepthRaw64)->Unit(benchmark::kMillisecond);

void BM_DecodeDepthRaw64(benchmark::State& state) {
  const std::string bytes = encode_depth(fixture().scene.depth, DepthFormat::kRaw64);
  for (auto _ : state) benchmark::DoNotOptimize(decode_depth(bytes, DepthFormat::kRaw64));
}
BENCHMARK(BM_DecodeDepthRaw64)->Unit(benchmark::kMillisecond);

void BM_Render(benchmark::State& state) {
  SceneSpec spec;
  spec.geometry = Sphere{};
  for (auto _ : state) benchmark::DoNotOptimize(render(spec, {1}));
}
BENCHMARK(BM_Render)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
