#include <benchmark/benchmark.h>

#include <random>

#include "lle/losses.hpp"
#include "lle/refine_net.hpp"

namespace ag = lle::ag;

namespace {

ag::Tensor noise(const ag::Shape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> v(ag::shape_numel(shape));
  for (float& x : v) x = u(rng);
  return ag::Tensor::from_data(shape, std::move(v));
}

void BM_Conv3x3(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const ag::ConvParams p = ag::make_conv(c, c, 3, 1, 1, rng);
  const ag::Tensor x = noise({4, c, 32, 32}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ag::conv2d(x, p));
}
BENCHMARK(BM_Conv3x3)->Arg(4)->Arg(16)->Arg(32);

// One forward and backward pass of the generator at training width.
void BM_GeneratorStep(benchmark::State& state) {
  const lle::GeneratorModel g(0.125, 0);
  const ag::Tensor x = noise({16, 3, 32, 32}, 3);
  for (auto _ : state) {
    const ag::Tensor loss = lle::loss_tv(g.forward(x));
    loss.backward();
    benchmark::DoNotOptimize(loss.item());
  }
}
BENCHMARK(BM_GeneratorStep)->Unit(benchmark::kMillisecond);

}  // namespace
