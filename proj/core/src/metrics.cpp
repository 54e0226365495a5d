#include "lle/metrics.hpp"

#include <cmath>
#include <string>

#include "filter.hpp"
#include "lle/error.hpp"

namespace lle {

namespace {

void require_same_extent(const RgbImage& a, const RgbImage& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ShapeError(std::string(what) + ": images differ in size (" + std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                     std::to_string(b.height()) + ")");
  }
}

constexpr std::size_t kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

// Weighted window sums at every valid position (no padding).
std::vector<double> window_filter(const std::vector<double>& src, std::size_t w, std::size_t h,
                                  const std::vector<double>& k) {
  const std::size_t n = k.size();
  const std::size_t ow = w - n + 1, oh = h - n + 1;
  std::vector<double> tmp(h * ow), out(oh * ow);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * src[y * w + x + i];
      tmp[y * ow + x] = acc;
    }
  }
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * tmp[(y + i) * ow + x];
      out[y * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double psnr(const RgbImage& a, const RgbImage& b) {
  require_same_extent(a, b, "psnr");
  if (a.empty()) throw ArgumentError("psnr of empty images");
  double acc = 0.0;
  for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
    auto da = a.channel(c).data();
    auto db = b.channel(c).data();
    for (std::size_t i = 0; i < da.size(); ++i) {
      const double d = static_cast<double>(da[i]) - static_cast<double>(db[i]);
      acc += d * d;
    }
  }
  const double mse = acc / static_cast<double>(a.pixel_count() * RgbImage::kChannels);
  if (mse < 1e-12) return kPsnrSaturationDb;
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const RgbImage& a, const RgbImage& b) {
  require_same_extent(a, b, "ssim");
  if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
    throw ArgumentError("ssim needs images of at least 11x11");
  }
  const std::size_t w = a.width(), h = a.height();
  const ImagePlane pa = luminance(a), pb = luminance(b);
  const auto la = pa.data();
  const auto lb = pb.data();
  std::vector<double> x(la.begin(), la.end()), y(lb.begin(), lb.end());
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto k = detail::gaussian_kernel<double>(kSsimSigma, kSsimWindow / 2);
  const auto mu_x = window_filter(x, w, h, k);
  const auto mu_y = window_filter(y, w, h, k);
  const auto e_xx = window_filter(xx, w, h, k);
  const auto e_yy = window_filter(yy, w, h, k);
  const auto e_xy = window_filter(xy, w, h, k);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i], my = mu_y[i];
    const double vx = e_xx[i] - mx * mx;
    const double vy = e_yy[i] - my * my;
    const double cxy = e_xy[i] - mx * my;
    total += ((2.0 * mx * my + kC1) * (2.0 * cxy + kC2)) / ((mx * mx + my * my + kC1) * (vx + vy + kC2));
  }
  return total / static_cast<double>(mu_x.size());
}

}  // namespace lle
