#pragma once

#include "lle/image.hpp"

namespace lle {

/// Constants of the global adaptation tone curve.
struct ToneMapConfig {
  /// Offset inside the log-average so black pixels stay finite.
  double sigma = 1e-4;
  /// Guard added to the luminance divisor of the per-pixel gain.
  double epsilon_div = 1e-6;

  void validate() const;
};

/// exp(mean(log(sigma + L))) over every sample of the plane.
double log_average_luminance(const ImagePlane& lum, const ToneMapConfig& cfg = {});

/// log(L / avg + 1) / log(max / avg + 1), evaluated per pixel.
/// Throws ArgumentError when `log_avg` or `max_lum` is not positive.
ImagePlane global_adaptation(const ImagePlane& lum, double log_avg, double max_lum);

/// Stage-one enhancement: scales each pixel's RGB by L_g / (L_w + eps) and clamps.
/// An all-black input is returned unchanged.
RgbImage pre_enhance(const RgbImage& img, const ToneMapConfig& cfg = {});

struct RetinexDecomposition {
  ImagePlane illumination;
  RgbImage reflectance;
};

/// Illumination is the per-pixel channel max; reflectance is X / (I + eps), clamped.
RetinexDecomposition decompose_retinex(const RgbImage& img, const ToneMapConfig& cfg = {});

}  // namespace lle
