#include "lle/tone_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lle/error.hpp"

namespace lle {

void ToneMapConfig::validate() const {
  if (!(sigma > 0.0) || !(epsilon_div > 0.0)) {
    throw ArgumentError("tone map sigma and epsilon_div must be positive");
  }
}

double log_average_luminance(const ImagePlane& lum, const ToneMapConfig& cfg) {
  cfg.validate();
  if (lum.empty()) throw ArgumentError("log-average of an empty plane");
  double acc = 0.0;
  for (float v : lum.data()) acc += std::log(cfg.sigma + static_cast<double>(v));
  return std::exp(acc / static_cast<double>(lum.size()));
}

ImagePlane global_adaptation(const ImagePlane& lum, double log_avg, double max_lum) {
  if (!(log_avg > 0.0) || !(max_lum > 0.0)) {
    throw ArgumentError("global adaptation needs positive log-average (" + std::to_string(log_avg) +
                        ") and maximum (" + std::to_string(max_lum) + ")");
  }
  const double denom = std::log1p(max_lum / log_avg);
  std::vector<float> out(lum.size());
  auto src = lum.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>(std::log1p(static_cast<double>(src[i]) / log_avg) / denom);
  }
  return ImagePlane(lum.width(), lum.height(), std::move(out));
}

RgbImage pre_enhance(const RgbImage& img, const ToneMapConfig& cfg) {
  cfg.validate();
  const ImagePlane lum = luminance(img);
  const auto samples = lum.data();
  const float max_lum = *std::max_element(samples.begin(), samples.end());
  if (max_lum <= 0.0f) return img;

  const double log_avg = log_average_luminance(lum, cfg);
  const double denom = std::log1p(static_cast<double>(max_lum) / log_avg);

  RgbImage out(img.width(), img.height());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double lw = samples[i];
    const double lg = std::log1p(lw / log_avg) / denom;
    const double gain = lg / (lw + cfg.epsilon_div);
    for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
      const double v = gain * static_cast<double>(img.channel(c).data()[i]);
      out.channel(c).data()[i] = static_cast<float>(std::min(v, 1.0));
    }
  }
  return out;
}

RetinexDecomposition decompose_retinex(const RgbImage& img, const ToneMapConfig& cfg) {
  cfg.validate();
  ImagePlane illum(img.width(), img.height());
  RgbImage refl(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const float r = img.channel(0).data()[i];
    const float g = img.channel(1).data()[i];
    const float b = img.channel(2).data()[i];
    const float m = std::max({r, g, b});
    illum.data()[i] = m;
    for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
      const double v = img.channel(c).data()[i] / (static_cast<double>(m) + cfg.epsilon_div);
      refl.channel(c).data()[i] = static_cast<float>(std::min(v, 1.0));
    }
  }
  return {std::move(illum), std::move(refl)};
}

}  // namespace lle
