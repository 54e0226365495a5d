#pragma once

#include <optional>

#include "lle/image.hpp"

namespace lle {

/// Reported instead of +inf when two images are (numerically) identical.
inline constexpr double kPsnrSaturationDb = 100.0;

/// 10 log10(1 / MSE) with unit peak, MSE over all samples of all channels.
double psnr(const RgbImage& a, const RgbImage& b);

/// Mean SSIM of the luminance planes: 11x11 Gaussian window (sigma 1.5),
/// valid window positions only, C1 = 0.01^2, C2 = 0.03^2.
double ssim(const RgbImage& a, const RgbImage& b);

/// Per-image metric row; unset fields were not requested.
struct MetricReport {
  std::optional<double> psnr;
  std::optional<double> ssim;
  std::optional<double> niqe;
};

}  // namespace lle
