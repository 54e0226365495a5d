#include "lle/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <algorithm>

namespace lle::synth {

Scene Scene::random(std::uint64_t seed, std::size_t shape_count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  constexpr double two_pi = 2.0 * std::numbers::pi;

  Scene s;
  for (double& b : s.base_) b = range(0.3, 0.6);
  for (int i = 0; i < 4; ++i) {
    const double period = range(60.0, 200.0), angle = range(0.0, two_pi);
    s.background_waves_.push_back(
        {std::cos(angle) / period, std::sin(angle) / period, range(0.0, two_pi), range(0.03, 0.08)});
  }
  for (std::size_t i = 0; i < shape_count; ++i) {
    Shape sh{};
    sh.disk = unit(rng) < 0.3;
    sh.cx = range(-20.0, 300.0);
    sh.cy = range(-20.0, 300.0);
    sh.hx = range(5.0, 24.0);
    sh.hy = sh.disk ? sh.hx : range(5.0, 24.0);
    for (double& c : sh.color) c = range(0.1, 0.7);
    sh.shade_x = range(-0.004, 0.004);
    sh.shade_y = range(-0.004, 0.004);
    const double period = range(5.0, 11.0), angle = range(0.0, two_pi);
    sh.texture = {std::cos(angle) / period, std::sin(angle) / period, range(0.0, two_pi), range(0.01, 0.04)};
    s.shapes_.push_back(sh);
  }
  return s;
}

double Scene::background(double x, double y, std::size_t c) const {
  double v = base_[c];
  for (const auto& w : background_waves_) {
    v += w.amplitude * std::sin(2.0 * std::numbers::pi * (w.fx * x + w.fy * y) + w.phase + 0.7 * static_cast<double>(c));
  }
  return v;
}

RgbImage Scene::render(std::size_t width, std::size_t height, double dx, double dy) const {
  RgbImage img(width, height);
  for (std::size_t py = 0; py < height; ++py) {
    for (std::size_t px = 0; px < width; ++px) {
      const double x = static_cast<double>(px) + dx, y = static_cast<double>(py) + dy;
      const Shape* top = nullptr;
      for (const auto& sh : shapes_) {
        const double ux = x - sh.cx, uy = y - sh.cy;
        const bool inside = sh.disk ? (ux * ux + uy * uy <= sh.hx * sh.hx)
                                    : (std::fabs(ux) <= sh.hx && std::fabs(uy) <= sh.hy);
        if (inside) top = &sh;
      }
      for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
        double v;
        if (top) {
          const auto& t = top->texture;
          v = top->color[c] + top->shade_x * (x - top->cx) + top->shade_y * (y - top->cy) +
              t.amplitude * std::sin(2.0 * std::numbers::pi * (t.fx * x + t.fy * y) + t.phase);
        } else {
          v = background(x, y, c);
        }
        img.at(c, px, py) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return img;
}

RgbImage natural_image(std::uint64_t seed, std::size_t width, std::size_t height) {
  return Scene::random(seed).render(width, height);
}

RgbImage darken(const RgbImage& img, double gamma, double noise_sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  RgbImage out(img.width(), img.height());
  for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
    auto src = img.channel(c).data();
    auto dst = out.channel(c).data();
    for (std::size_t i = 0; i < src.size(); ++i) {
      const double v = std::pow(static_cast<double>(src[i]), gamma) + (noise_sigma > 0.0 ? noise(rng) : 0.0);
      dst[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

RgbImage add_gaussian_noise(const RgbImage& img, double sigma, std::uint64_t seed) {
  return darken(img, 1.0, sigma, seed);
}

RgbImage block_mean(const RgbImage& img, std::size_t block) {
  RgbImage out = img;
  if (block <= 1) return out;
  for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
    for (std::size_t by = 0; by < img.height(); by += block) {
      for (std::size_t bx = 0; bx < img.width(); bx += block) {
        const std::size_t ey = std::min(by + block, img.height()), ex = std::min(bx + block, img.width());
        double acc = 0.0;
        for (std::size_t y = by; y < ey; ++y) {
          for (std::size_t x = bx; x < ex; ++x) acc += img.at(c, x, y);
        }
        const auto mean = static_cast<float>(acc / static_cast<double>((ey - by) * (ex - bx)));
        for (std::size_t y = by; y < ey; ++y) {
          for (std::size_t x = bx; x < ex; ++x) out.at(c, x, y) = mean;
        }
      }
    }
  }
  return out;
}

}  // namespace lle::synth
