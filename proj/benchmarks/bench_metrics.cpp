#include <benchmark/benchmark.h>

#include "lle/metrics.hpp"
#include "lle/niqe.hpp"
#include "lle/synthetic.hpp"

namespace {

void BM_Ssim(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const lle::RgbImage a = lle::synth::natural_image(1, n, n);
  const lle::RgbImage b = lle::synth::add_gaussian_noise(a, 0.05, 2);
  for (auto _ : state) benchmark::DoNotOptimize(lle::ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(128)->Arg(512);

void BM_Psnr(benchmark::State& state) {
  const lle::RgbImage a = lle::synth::natural_image(1, 512, 512);
  const lle::RgbImage b = lle::synth::add_gaussian_noise(a, 0.05, 2);
  for (auto _ : state) benchmark::DoNotOptimize(lle::psnr(a, b));
}
BENCHMARK(BM_Psnr);

void BM_NiqeScore(benchmark::State& state) {
  std::vector<lle::RgbImage> corpus;
  for (std::uint64_t i = 0; i < 20; ++i) corpus.push_back(lle::synth::natural_image(100 + i, 96, 96));
  lle::NiqeOptions opts;
  opts.patch_size = 32;
  const lle::NiqeModel model = lle::niqe_fit(corpus, opts);
  const lle::RgbImage img = lle::synth::natural_image(7, 192, 192);
  for (auto _ : state) benchmark::DoNotOptimize(lle::niqe_score(img, model));
}
BENCHMARK(BM_NiqeScore)->Unit(benchmark::kMillisecond);

}  // namespace
