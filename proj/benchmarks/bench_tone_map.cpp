#include <benchmark/benchmark.h>

#include "lle/synthetic.hpp"
#include "lle/tone_map.hpp"

namespace {

void BM_PreEnhance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const lle::RgbImage img = lle::synth::darken(lle::synth::natural_image(1, n, n), 3.0, 0.02, 2);
  for (auto _ : state) benchmark::DoNotOptimize(lle::pre_enhance(img));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n * n));
}
BENCHMARK(BM_PreEnhance)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
