#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <iterator>

#include "lle/error.hpp"
#include "lle/synthetic.hpp"

namespace lle::testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("lle-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RgbImage random_image(std::size_t width, std::size_t height, std::mt19937_64& rng, float lo, float hi) {
  std::uniform_real_distribution<float> u(lo, hi);
  RgbImage img(width, height);
  for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
    for (auto& v : img.channel(c).data()) v = u(rng);
  }
  return img;
}

UnpairedDataset smoke_dataset() {
  std::vector<RgbImage> low, normal;
  for (std::uint64_t i = 0; i < 16; ++i) {
    low.push_back(synth::darken(synth::natural_image(200 + i, 32, 32), 3.0, 0.02, 300 + i));
    normal.push_back(synth::natural_image(400 + i, 32, 32));
  }
  return UnpairedDataset(std::move(low), std::move(normal));
}

TrainConfig smoke_config() {
  TrainConfig cfg = TrainConfig::desk_scale();
  cfg.epochs = 1000;
  cfg.max_steps = 200;
  cfg.seed = 7;
  return cfg;
}

ScenePair match_scene(std::size_t index) {
  const auto scene = synth::Scene::random(100 + index, 120);
  return {synth::darken(scene.render(192, 192, 5.0, 3.0), 3.0, 0.02, 1000 + index), scene.render(192, 192)};
}

std::vector<RgbImage> niqe_corpus() {
  std::vector<RgbImage> corpus;
  for (std::uint64_t i = 0; i < 20; ++i) corpus.push_back(synth::natural_image(5000 + i, kNiqeImageSize, kNiqeImageSize));
  return corpus;
}

RgbImage niqe_probe(std::size_t index) { return synth::natural_image(9000 + index, kNiqeImageSize, kNiqeImageSize); }

}  // namespace lle::testing
