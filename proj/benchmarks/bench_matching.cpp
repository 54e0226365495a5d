#include <benchmark/benchmark.h>

#include "lle/features.hpp"
#include "lle/matching.hpp"
#include "lle/synthetic.hpp"

namespace {

const lle::RgbImage& scene() {
  static const lle::RgbImage img = lle::synth::natural_image(5, 256, 256);
  return img;
}

void BM_Detect(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lle::detect(scene(), 1000));
}
BENCHMARK(BM_Detect)->Unit(benchmark::kMillisecond);

void BM_DescribeAndMatch(benchmark::State& state) {
  const auto kps = lle::detect(scene(), 1000);
  for (auto _ : state) {
    const auto d = lle::describe(scene(), kps);
    std::vector<lle::Descriptor> desc;
    for (const auto& k : d) desc.push_back(k.descriptor);
    benchmark::DoNotOptimize(lle::match(desc, desc, 0.3));
  }
}
BENCHMARK(BM_DescribeAndMatch)->Unit(benchmark::kMillisecond);

void BM_EvaluatePair(benchmark::State& state) {
  const lle::RgbImage low = lle::synth::darken(scene(), 3.0, 0.02, 9);
  for (auto _ : state) benchmark::DoNotOptimize(lle::evaluate_pair(low, scene()));
}
BENCHMARK(BM_EvaluatePair)->Unit(benchmark::kMillisecond);

}  // namespace
