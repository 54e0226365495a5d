#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace lle {

/// Single-channel float image, row-major, samples in [0,1].
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(std::size_t width, std::size_t height, float fill = 0.0f);
  /// Takes ownership of `data`; samples are clamped to [0,1].
  ImagePlane(std::size_t width, std::size_t height, std::vector<float> data);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
  float& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  void clamp();

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<float> data_;
};

/// Three-channel (R, G, B) float image with planar storage.
class RgbImage {
 public:
  static constexpr std::size_t kChannels = 3;

  RgbImage() = default;
  RgbImage(std::size_t width, std::size_t height, float fill = 0.0f);
  /// Builds from three planes of identical extent.
  RgbImage(ImagePlane r, ImagePlane g, ImagePlane b);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixel_count() const { return width_ * height_; }
  bool empty() const { return pixel_count() == 0; }

  const ImagePlane& channel(std::size_t c) const { return channels_[c]; }
  ImagePlane& channel(std::size_t c) { return channels_[c]; }

  float at(std::size_t c, std::size_t x, std::size_t y) const { return channels_[c](x, y); }
  float& at(std::size_t c, std::size_t x, std::size_t y) { return channels_[c](x, y); }

  void clamp();

  friend bool operator==(const RgbImage& a, const RgbImage& b);

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::array<ImagePlane, kChannels> channels_;
};

/// Reads 8-bit PNG (gray, gray+alpha, RGB, RGBA) or binary PPM (P6, maxval 255).
/// Alpha is discarded and gray is replicated to three channels.
RgbImage load_image(const std::filesystem::path& path);

/// Clamps to [0,1], quantizes with round-half-up to 8 bits and writes RGB PNG.
void save_image(const RgbImage& img, const std::filesystem::path& path);

/// Binary PPM writer; used for bit-exact fixtures.
void save_ppm(const RgbImage& img, const std::filesystem::path& path);

/// 8-bit quantization used by every writer.
unsigned char quantize_sample(float v);

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
ImagePlane luminance(const RgbImage& img);

/// Copies the size x size block whose top-left corner is (x, y).
RgbImage crop_patch(const RgbImage& img, std::size_t x, std::size_t y, std::size_t size);

/// Multiplies every sample by `factor` (result clamped).
RgbImage scaled(const RgbImage& img, float factor);

bool is_supported_image(const std::filesystem::path& path);

}  // namespace lle
