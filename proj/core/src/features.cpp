#include "lle/features.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "filter.hpp"

namespace lle {

namespace {

constexpr int kPatchRadius = 15;
constexpr std::size_t kTests = 256;

struct PairTest {
  int x1, y1, x2, y2;
};

// Offsets drawn once from an isotropic Gaussian (sigma = 31/5), clipped to the patch.
const std::array<PairTest, kTests>& pair_tests() {
  static const auto tests = [] {
    std::array<PairTest, kTests> t{};
    std::mt19937_64 rng(0xb41efULL);
    std::normal_distribution<double> n(0.0, 31.0 / 5.0);
    auto draw = [&] {
      return static_cast<int>(std::clamp(std::lround(n(rng)), -static_cast<long>(kPatchRadius),
                                         static_cast<long>(kPatchRadius)));
    };
    for (auto& p : t) {
      do {
        p = {draw(), draw(), draw(), draw()};
      } while (p.x1 == p.x2 && p.y1 == p.y2);
    }
    return t;
  }();
  return tests;
}

std::vector<float> luminance_vector(const RgbImage& img) {
  const ImagePlane lum = luminance(img);
  return {lum.data().begin(), lum.data().end()};
}

}  // namespace

std::vector<Keypoint> detect(const RgbImage& img, std::size_t max_points, const DetectorConfig& cfg) {
  const std::size_t w = img.width(), h = img.height();
  if (max_points == 0 || w < 3 || h < 3) return {};
  const std::vector<float> lum = luminance_vector(img);

  std::vector<float> ixx(w * h, 0.0f), iyy(w * h, 0.0f), ixy(w * h, 0.0f);
  for (std::size_t y = 1; y + 1 < h; ++y) {
    for (std::size_t x = 1; x + 1 < w; ++x) {
      auto at = [&](std::size_t xx, std::size_t yy) { return lum[yy * w + xx]; };
      const float gx = ((at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1))) / 8.0f;
      const float gy = ((at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1))) / 8.0f;
      ixx[y * w + x] = gx * gx;
      iyy[y * w + x] = gy * gy;
      ixy[y * w + x] = gx * gy;
    }
  }
  const auto radius = static_cast<std::size_t>(std::ceil(3.0 * cfg.window_sigma));
  const auto k = detail::gaussian_kernel<float>(cfg.window_sigma, radius);
  const auto sxx = detail::separable_filter(ixx, w, h, k);
  const auto syy = detail::separable_filter(iyy, w, h, k);
  const auto sxy = detail::separable_filter(ixy, w, h, k);
  std::vector<double> resp(w * h);
  for (std::size_t i = 0; i < resp.size(); ++i) {
    const double a = sxx[i], b = syy[i], c = sxy[i];
    resp[i] = a * b - c * c - cfg.harris_k * (a + b) * (a + b);
  }

  const std::size_t margin = std::max<std::size_t>(cfg.border, 1);
  const long r = static_cast<long>(cfg.nms_radius);
  std::vector<Keypoint> out;
  for (std::size_t y = margin; y + margin < h; ++y) {
    for (std::size_t x = margin; x + margin < w; ++x) {
      const double v = resp[y * w + x];
      if (!(v > cfg.threshold)) continue;
      bool is_max = true;
      for (long dy = -r; dy <= r && is_max; ++dy) {
        for (long dx = -r; dx <= r; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const long yy = static_cast<long>(y) + dy, xx = static_cast<long>(x) + dx;
          if (yy < 0 || xx < 0 || yy >= static_cast<long>(h) || xx >= static_cast<long>(w)) continue;
          const double o = resp[static_cast<std::size_t>(yy) * w + static_cast<std::size_t>(xx)];
          // Plateaus keep only their first pixel in raster order.
          if (o > v || (o == v && (dy < 0 || (dy == 0 && dx < 0)))) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max) continue;
      auto offset = [](double m, double c0, double p) {
        const double denom = m - 2.0 * c0 + p;
        if (denom >= 0.0) return 0.0;
        return std::clamp(0.5 * (m - p) / denom, -0.5, 0.5);
      };
      const double sx = offset(resp[y * w + x - 1], v, resp[y * w + x + 1]);
      const double sy = offset(resp[(y - 1) * w + x], v, resp[(y + 1) * w + x]);
      out.push_back({static_cast<double>(x) + sx, static_cast<double>(y) + sy, v});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Keypoint& a, const Keypoint& b) { return a.response > b.response; });
  if (out.size() > max_points) out.resize(max_points);
  return out;
}

std::vector<DescribedKeypoint> describe(const RgbImage& img, const std::vector<Keypoint>& kps) {
  std::vector<DescribedKeypoint> out;
  if (kps.empty()) return out;
  const std::size_t w = img.width(), h = img.height();
  const auto k = detail::gaussian_kernel<float>(2.0, 4);
  const auto smooth = detail::separable_filter(luminance_vector(img), w, h, k);
  const auto& tests = pair_tests();
  const double border = static_cast<double>(kDescriptorBorder);
  for (std::size_t i = 0; i < kps.size(); ++i) {
    const long cx = std::lround(kps[i].x), cy = std::lround(kps[i].y);
    if (kps[i].x < border || kps[i].y < border || static_cast<double>(w) - kps[i].x <= border ||
        static_cast<double>(h) - kps[i].y <= border) {
      continue;
    }
    Descriptor d;
    for (std::size_t t = 0; t < kTests; ++t) {
      const auto& p = tests[t];
      const float a = smooth[static_cast<std::size_t>(cy + p.y1) * w + static_cast<std::size_t>(cx + p.x1)];
      const float b = smooth[static_cast<std::size_t>(cy + p.y2) * w + static_cast<std::size_t>(cx + p.x2)];
      if (a < b) d.bits[t / 64] |= std::uint64_t{1} << (t % 64);
    }
    out.push_back({i, d});
  }
  return out;
}

}  // namespace lle
