#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lle/image.hpp"
#include "lle/trainer.hpp"

namespace lle::testing {

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes);
std::vector<unsigned char> read_bytes(const std::filesystem::path& path);

/// Samples uniform in [lo, hi] per channel.
RgbImage random_image(std::size_t width, std::size_t height, std::mt19937_64& rng, float lo = 0.0f, float hi = 1.0f);

/// Training fixture: 16 darkened (gamma 3, noise 0.02) and 16 clean synthetic 32x32 patches.
UnpairedDataset smoke_dataset();
/// Desk-scale configuration of the 200-step training smoke run.
TrainConfig smoke_config();

/// Matching fixture: a normal-light render and a darkened, shifted render of one scene.
struct ScenePair {
  RgbImage low;
  RgbImage normal;
};
inline constexpr std::size_t kMatchScenes = 12;
ScenePair match_scene(std::size_t index);

/// NIQE fixture: pristine corpus and patch size.
inline constexpr std::size_t kNiqeImageSize = 192;
inline constexpr std::size_t kNiqePatch = 32;
std::vector<RgbImage> niqe_corpus();
RgbImage niqe_probe(std::size_t index);

}  // namespace lle::testing
