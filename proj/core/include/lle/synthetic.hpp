#pragma once

#include <cstdint>
#include <vector>

#include "lle/image.hpp"

namespace lle::synth {

/// Procedural scene of shaded, lightly textured rectangles and disks over a
/// smooth background. Rendering is a pure function of scene coordinates, so
/// offset renders are exact translations of each other.
class Scene {
 public:
  static Scene random(std::uint64_t seed, std::size_t shape_count = 40);

  /// Pixel (x, y) samples scene point (x + dx, y + dy).
  RgbImage render(std::size_t width, std::size_t height, double dx = 0.0, double dy = 0.0) const;

 private:
  struct Wave {
    double fx, fy, phase, amplitude;
  };
  struct Shape {
    bool disk;
    double cx, cy, hx, hy;  // centre and half extents (radius in hx for disks)
    double color[3];
    double shade_x, shade_y;
    Wave texture;
  };

  double background(double x, double y, std::size_t c) const;

  double base_[3]{};
  std::vector<Wave> background_waves_;
  std::vector<Shape> shapes_;
};

/// Scene::random(seed).render(width, height).
RgbImage natural_image(std::uint64_t seed, std::size_t width, std::size_t height);

/// v^gamma plus i.i.d. Gaussian noise, clamped.
RgbImage darken(const RgbImage& img, double gamma, double noise_sigma, std::uint64_t seed);

RgbImage add_gaussian_noise(const RgbImage& img, double sigma, std::uint64_t seed);

/// Replaces every block x block tile by its mean (a blocking-artifact analog).
RgbImage block_mean(const RgbImage& img, std::size_t block);

}  // namespace lle::synth
