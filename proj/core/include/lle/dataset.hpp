#pragma once

#include <filesystem>
#include <random>
#include <vector>

#include "lle/image.hpp"
#include "lle/tensor.hpp"

namespace lle {

/// Two independent image pools with no pairing between them.
class UnpairedDataset {
 public:
  UnpairedDataset(std::vector<RgbImage> low, std::vector<RgbImage> normal);

  /// Loads every PNG/PPM file (sorted by name) from each directory.
  static UnpairedDataset from_directories(const std::filesystem::path& low_dir,
                                          const std::filesystem::path& normal_dir);

  const std::vector<RgbImage>& low() const { return low_; }
  const std::vector<RgbImage>& normal() const { return normal_; }

  /// Indices of images at least `patch` pixels in both extents.
  std::vector<std::size_t> eligible_low(std::size_t patch) const;
  std::vector<std::size_t> eligible_normal(std::size_t patch) const;

  /// Logs a warning per undersized image; throws DatasetError when a pool
  /// has no usable image.
  void check_patch_size(std::size_t patch) const;

 private:
  std::vector<RgbImage> low_;
  std::vector<RgbImage> normal_;
};

/// Independently drawn patches from each pool.
struct PatchBatch {
  std::vector<RgbImage> low;
  std::vector<RgbImage> normal;
  std::vector<std::size_t> low_sources;
  std::vector<std::size_t> normal_sources;
};

/// Draws `batch_size` patches per pool: an image uniformly among those large
/// enough, then a crop origin uniformly among valid positions.
PatchBatch sample_batch(const UnpairedDataset& ds, std::size_t patch_size, std::size_t batch_size,
                        std::mt19937_64& rng);

/// Stacks equally sized images into an N x 3 x H x W tensor.
ag::Tensor to_tensor(const std::vector<RgbImage>& images);
/// 3 x H x W tensor of one image.
ag::Tensor to_tensor(const RgbImage& image);
/// Inverse of to_tensor for a 3xHxW tensor or the `index`-th item of a batch.
RgbImage to_image(const ag::Tensor& t, std::size_t index = 0);

/// Supported image files in `dir`, sorted by filename.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

}  // namespace lle
