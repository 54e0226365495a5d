#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "lle/image.hpp"

namespace lle {

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double response = 0.0;
};

/// 256-bit binary descriptor compared by Hamming distance.
struct Descriptor {
  std::array<std::uint64_t, 4> bits{};

  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

inline int hamming(const Descriptor& a, const Descriptor& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) d += std::popcount(a.bits[i] ^ b.bits[i]);
  return d;
}

/// Harris detector settings.
struct DetectorConfig {
  double harris_k = 0.04;
  /// Gaussian integration scale of the structure tensor.
  double window_sigma = 1.5;
  /// Absolute response floor on unit-range luminance.
  double threshold = 1e-6;
  /// Non-maximum suppression radius.
  std::size_t nms_radius = 4;
  /// Pixels this close to the border are never reported.
  std::size_t border = 16;
};

inline constexpr std::size_t kDescriptorBorder = 16;

/// Harris corners on luminance after non-maximum suppression, strongest
/// first, at most `max_points`. Sub-pixel positions come from a per-axis
/// parabola through the response. A constant image yields no points.
std::vector<Keypoint> detect(const RgbImage& img, std::size_t max_points, const DetectorConfig& cfg = {});

/// Descriptor of one keypoint, or nullopt when the 31x31 sampling patch
/// (plus the smoothing margin) does not fit: keypoints closer than 16 px to
/// the border are dropped.
struct DescribedKeypoint {
  std::size_t keypoint_index;
  Descriptor descriptor;
};

/// BRIEF-style descriptors: 256 fixed pixel-pair intensity tests on the
/// Gaussian-smoothed (sigma 2) luminance. Border keypoints are dropped, so
/// the result may be shorter than `kps`.
std::vector<DescribedKeypoint> describe(const RgbImage& img, const std::vector<Keypoint>& kps);

}  // namespace lle
