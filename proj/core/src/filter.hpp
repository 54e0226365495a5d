#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace lle::detail {

template <typename T>
std::vector<T> gaussian_kernel(double sigma, std::size_t radius) {
  std::vector<T> k(2 * radius + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(radius);
    const double v = std::exp(-d * d / (2.0 * sigma * sigma));
    k[i] = static_cast<T>(v);
    total += v;
  }
  for (auto& v : k) v = static_cast<T>(static_cast<double>(v) / total);
  return k;
}

/// Separable correlation with a symmetric kernel; borders replicate the edge sample.
template <typename T>
std::vector<T> separable_filter(const std::vector<T>& src, std::size_t width, std::size_t height,
                                const std::vector<T>& kernel) {
  const long r = static_cast<long>(kernel.size() / 2);
  const long w = static_cast<long>(width), h = static_cast<long>(height);
  std::vector<T> tmp(src.size()), out(src.size());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      T acc = 0;
      for (long k = -r; k <= r; ++k) acc += kernel[k + r] * src[y * w + std::clamp(x + k, 0L, w - 1)];
      tmp[y * w + x] = acc;
    }
  }
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      T acc = 0;
      for (long k = -r; k <= r; ++k) acc += kernel[k + r] * tmp[std::clamp(y + k, 0L, h - 1) * w + x];
      out[y * w + x] = acc;
    }
  }
  return out;
}

}  // namespace lle::detail
