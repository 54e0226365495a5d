#include "lle/ops.hpp"

#include <algorithm>
#include <cmath>

#include "lle/error.hpp"

namespace lle::ag {

namespace {

struct Layout {
  std::size_t n = 1, c = 0, h = 0, w = 0;
  bool batched = false;

  std::size_t plane() const { return h * w; }
  Shape shape_with(std::size_t channels, std::size_t height, std::size_t width) const {
    if (batched) return {n, channels, height, width};
    return {channels, height, width};
  }
};

Layout image_layout(const Tensor& t, const char* op) {
  const auto& s = t.shape();
  if (s.size() == 3) return {1, s[0], s[1], s[2], false};
  if (s.size() == 4) return {s[0], s[1], s[2], s[3], true};
  throw ShapeError(std::string(op) + ": expected CxHxW or NxCxHxW tensor, got " + shape_to_string(s));
}

detail::Node& in_node(detail::Node& self, std::size_t i) { return *self.inputs[i]; }

// Applies f elementwise; df(x, y) returns dy/dx given input x and output y.
template <typename F, typename DF>
Tensor unary(const Tensor& x, F f, DF df) {
  std::vector<float> out(x.numel());
  auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return Tensor::make_result(x.shape(), std::move(out), {x}, [df](detail::Node& self) {
    detail::Node& a = in_node(self, 0);
    for (std::size_t i = 0; i < self.grad.size(); ++i) a.grad[i] += self.grad[i] * df(a.data[i], self.data[i]);
  });
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
  }
}

struct ConvGeometry {
  std::size_t n, c, h, w, oc, kh, kw, stride, pad, oh, ow;

  // Output columns [lo, hi) whose input column ox*stride + k - pad lies in [0, extent).
  static std::pair<std::size_t, std::size_t> valid_range(std::size_t k, std::size_t pad, std::size_t stride,
                                                         std::size_t extent, std::size_t out_extent) {
    const long long offset = static_cast<long long>(k) - static_cast<long long>(pad);
    const long long s = static_cast<long long>(stride);
    long long lo = offset >= 0 ? 0 : (-offset + s - 1) / s;
    long long hi = (static_cast<long long>(extent) - 1 - offset) / s + 1;
    if (static_cast<long long>(extent) - 1 - offset < 0) hi = 0;
    hi = std::min<long long>(hi, static_cast<long long>(out_extent));
    lo = std::min(lo, hi);
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
  }
};

// Visits every (output row, input row, output column range) for kernel tap
// (ky, kx); body(out_row, in_row, ox_lo, ox_hi, in_col_offset).
template <typename Body>
void for_each_tap_row(const ConvGeometry& g, std::size_t ky, std::size_t kx, Body&& body) {
  const auto [oy_lo, oy_hi] = ConvGeometry::valid_range(ky, g.pad, g.stride, g.h, g.oh);
  const auto [ox_lo, ox_hi] = ConvGeometry::valid_range(kx, g.pad, g.stride, g.w, g.ow);
  if (ox_lo >= ox_hi) return;
  for (std::size_t oy = oy_lo; oy < oy_hi; ++oy) {
    const std::size_t iy = oy * g.stride + ky - g.pad;
    body(oy, iy, ox_lo, ox_hi);
  }
}

void conv_forward(const ConvGeometry& g, const float* x, const float* k, const float* b, float* y) {
  const std::size_t in_plane = g.h * g.w;
  const std::size_t out_plane = g.oh * g.ow;
  for (std::size_t n = 0; n < g.n; ++n) {
    for (std::size_t oc = 0; oc < g.oc; ++oc) {
      float* yp = y + (n * g.oc + oc) * out_plane;
      std::fill(yp, yp + out_plane, b[oc]);
      for (std::size_t ic = 0; ic < g.c; ++ic) {
        const float* xp = x + (n * g.c + ic) * in_plane;
        const float* kp = k + (oc * g.c + ic) * g.kh * g.kw;
        for (std::size_t ky = 0; ky < g.kh; ++ky) {
          for (std::size_t kx = 0; kx < g.kw; ++kx) {
            const float wv = kp[ky * g.kw + kx];
            for_each_tap_row(g, ky, kx, [&](std::size_t oy, std::size_t iy, std::size_t lo, std::size_t hi) {
              float* __restrict yr = yp + oy * g.ow + lo;
              const float* __restrict xr = xp + iy * g.w + (lo * g.stride + kx - g.pad);
              const std::size_t count = hi - lo;
              if (g.stride == 1) {
                for (std::size_t j = 0; j < count; ++j) yr[j] += wv * xr[j];
              } else {
                for (std::size_t j = 0; j < count; ++j) yr[j] += wv * xr[j * g.stride];
              }
            });
          }
        }
      }
    }
  }
}

void conv_backward(const ConvGeometry& g, const float* x, const float* k, const float* gy, float* gx,
                   float* gk, float* gb) {
  const std::size_t in_plane = g.h * g.w;
  const std::size_t out_plane = g.oh * g.ow;
  for (std::size_t n = 0; n < g.n; ++n) {
    for (std::size_t oc = 0; oc < g.oc; ++oc) {
      const float* gyp = gy + (n * g.oc + oc) * out_plane;
      if (gb) {
        double acc = 0.0;
        for (std::size_t i = 0; i < out_plane; ++i) acc += gyp[i];
        gb[oc] += static_cast<float>(acc);
      }
      for (std::size_t ic = 0; ic < g.c; ++ic) {
        const float* xp = x + (n * g.c + ic) * in_plane;
        float* gxp = gx ? gx + (n * g.c + ic) * in_plane : nullptr;
        const float* kp = k + (oc * g.c + ic) * g.kh * g.kw;
        float* gkp = gk ? gk + (oc * g.c + ic) * g.kh * g.kw : nullptr;
        for (std::size_t ky = 0; ky < g.kh; ++ky) {
          for (std::size_t kx = 0; kx < g.kw; ++kx) {
            const float wv = kp[ky * g.kw + kx];
            double wacc = 0.0;
            for_each_tap_row(g, ky, kx, [&](std::size_t oy, std::size_t iy, std::size_t lo, std::size_t hi) {
              const float* __restrict gyr = gyp + oy * g.ow + lo;
              const std::size_t col0 = iy * g.w + (lo * g.stride + kx - g.pad);
              const std::size_t count = hi - lo;
              if (gxp) {
                float* __restrict gxr = gxp + col0;
                if (g.stride == 1) {
                  for (std::size_t j = 0; j < count; ++j) gxr[j] += wv * gyr[j];
                } else {
                  for (std::size_t j = 0; j < count; ++j) gxr[j * g.stride] += wv * gyr[j];
                }
              }
              if (gkp) {
                const float* __restrict xr = xp + col0;
                float row = 0.0f;
                if (g.stride == 1) {
                  for (std::size_t j = 0; j < count; ++j) row += xr[j] * gyr[j];
                } else {
                  for (std::size_t j = 0; j < count; ++j) row += xr[j * g.stride] * gyr[j];
                }
                wacc += row;
              }
            });
            if (gkp) gkp[ky * g.kw + kx] += static_cast<float>(wacc);
          }
        }
      }
    }
  }
}

}  // namespace

ConvParams make_conv(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_size,
                     std::size_t stride, std::size_t padding, std::mt19937_64& rng) {
  if (in_channels == 0 || out_channels == 0 || kernel_size == 0 || stride == 0) {
    throw ArgumentError("convolution extents and stride must be positive");
  }
  const double fan_in = static_cast<double>(in_channels * kernel_size * kernel_size);
  const double fan_out = static_cast<double>(out_channels * kernel_size * kernel_size);
  const float bound = static_cast<float>(std::sqrt(6.0 / (fan_in + fan_out)));
  std::uniform_real_distribution<float> dist(-bound, bound);
  std::vector<float> k(out_channels * in_channels * kernel_size * kernel_size);
  for (float& v : k) v = dist(rng);
  ConvParams p;
  p.kernel = Tensor::from_data({out_channels, in_channels, kernel_size, kernel_size}, std::move(k), true);
  p.bias = Tensor::zeros({out_channels}, true);
  p.stride = stride;
  p.padding = padding;
  return p;
}

std::size_t conv_output_extent(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t padding) {
  if (in + 2 * padding < kernel) throw ShapeError("convolution input smaller than kernel");
  return (in + 2 * padding - kernel) / stride + 1;
}

Tensor conv2d(const Tensor& input, const ConvParams& p) {
  const Layout l = image_layout(input, "conv2d");
  if (p.kernel.rank() != 4 || p.bias.rank() != 1 || p.bias.dim(0) != p.kernel.dim(0)) {
    throw ShapeError("conv2d: kernel must be OCxICxKHxKW with an OC-length bias");
  }
  if (p.kernel.dim(1) != l.c) {
    throw ShapeError("conv2d: input has " + std::to_string(l.c) + " channels, kernel expects " +
                     std::to_string(p.kernel.dim(1)));
  }
  if (p.stride == 0) throw ArgumentError("conv2d: stride must be positive");
  ConvGeometry g{l.n, l.c, l.h, l.w, p.kernel.dim(0), p.kernel.dim(2), p.kernel.dim(3), p.stride, p.padding, 0, 0};
  g.oh = conv_output_extent(g.h, g.kh, g.stride, g.pad);
  g.ow = conv_output_extent(g.w, g.kw, g.stride, g.pad);

  std::vector<float> out(g.n * g.oc * g.oh * g.ow);
  conv_forward(g, input.data().data(), p.kernel.data().data(), p.bias.data().data(), out.data());
  return Tensor::make_result(l.shape_with(g.oc, g.oh, g.ow), std::move(out), {input, p.kernel, p.bias},
                             [g](detail::Node& self) {
                               detail::Node& x = in_node(self, 0);
                               detail::Node& k = in_node(self, 1);
                               detail::Node& b = in_node(self, 2);
                               conv_backward(g, x.data.data(), k.data.data(), self.grad.data(),
                                             x.requires_grad ? x.grad.data() : nullptr,
                                             k.requires_grad ? k.grad.data() : nullptr,
                                             b.requires_grad ? b.grad.data() : nullptr);
                             });
}

Tensor max_pool2(const Tensor& input) {
  const Layout l = image_layout(input, "max_pool2");
  if (l.h % 2 != 0 || l.w % 2 != 0) {
    throw ShapeError("max_pool2: spatial extents must be even, got " + shape_to_string(input.shape()));
  }
  const std::size_t oh = l.h / 2, ow = l.w / 2;
  const std::size_t planes = l.n * l.c;
  std::vector<float> out(planes * oh * ow);
  std::vector<std::uint32_t> argmax(out.size());
  auto x = input.data();
  for (std::size_t p = 0; p < planes; ++p) {
    const std::size_t base = p * l.plane();
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        std::size_t best = base + (2 * oy) * l.w + 2 * ox;
        const std::size_t cand[3] = {best + 1, best + l.w, best + l.w + 1};
        for (std::size_t c : cand) {
          if (x[c] > x[best]) best = c;
        }
        const std::size_t o = (p * oh + oy) * ow + ox;
        out[o] = x[best];
        argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
  return Tensor::make_result(l.shape_with(l.c, oh, ow), std::move(out), {input},
                             [argmax = std::move(argmax)](detail::Node& self) {
                               detail::Node& a = in_node(self, 0);
                               for (std::size_t i = 0; i < self.grad.size(); ++i) a.grad[argmax[i]] += self.grad[i];
                             });
}

Tensor upsample2(const Tensor& input) {
  const Layout l = image_layout(input, "upsample2");
  const std::size_t oh = l.h * 2, ow = l.w * 2;
  const std::size_t planes = l.n * l.c;
  std::vector<float> out(planes * oh * ow);
  auto x = input.data();
  for (std::size_t p = 0; p < planes; ++p) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      const float* src = x.data() + p * l.plane() + (oy / 2) * l.w;
      float* dst = out.data() + (p * oh + oy) * ow;
      for (std::size_t ox = 0; ox < ow; ++ox) dst[ox] = src[ox / 2];
    }
  }
  return Tensor::make_result(l.shape_with(l.c, oh, ow), std::move(out), {input}, [l, oh, ow](detail::Node& self) {
    detail::Node& a = in_node(self, 0);
    for (std::size_t p = 0; p < l.n * l.c; ++p) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        const float* g = self.grad.data() + (p * oh + oy) * ow;
        float* dst = a.grad.data() + p * l.plane() + (oy / 2) * l.w;
        for (std::size_t ox = 0; ox < ow; ++ox) dst[ox / 2] += g[ox];
      }
    }
  });
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  const Layout la = image_layout(a, "concat_channels");
  const Layout lb = image_layout(b, "concat_channels");
  if (la.batched != lb.batched || la.n != lb.n || la.h != lb.h || la.w != lb.w) {
    throw ShapeError("concat_channels: spatial/batch mismatch " + shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
  }
  const std::size_t c = la.c + lb.c;
  const std::size_t plane = la.plane();
  std::vector<float> out(la.n * c * plane);
  for (std::size_t n = 0; n < la.n; ++n) {
    auto da = a.data().subspan(n * la.c * plane, la.c * plane);
    auto db = b.data().subspan(n * lb.c * plane, lb.c * plane);
    float* dst = out.data() + n * c * plane;
    std::copy(da.begin(), da.end(), dst);
    std::copy(db.begin(), db.end(), dst + da.size());
  }
  return Tensor::make_result(la.shape_with(c, la.h, la.w), std::move(out), {a, b},
                             [la, lb, c, plane](detail::Node& self) {
                               detail::Node& x = in_node(self, 0);
                               detail::Node& y = in_node(self, 1);
                               for (std::size_t n = 0; n < la.n; ++n) {
                                 const float* g = self.grad.data() + n * c * plane;
                                 if (x.requires_grad) {
                                   float* gx = x.grad.data() + n * la.c * plane;
                                   for (std::size_t i = 0; i < la.c * plane; ++i) gx[i] += g[i];
                                 }
                                 if (y.requires_grad) {
                                   float* gy = y.grad.data() + n * lb.c * plane;
                                   const float* gsrc = g + la.c * plane;
                                   for (std::size_t i = 0; i < lb.c * plane; ++i) gy[i] += gsrc[i];
                                 }
                               }
                             });
}

Tensor forward_diff(const Tensor& input, Axis axis) {
  const Layout l = image_layout(input, "forward_diff");
  const bool horizontal = axis == Axis::Horizontal;
  const std::size_t oh = horizontal ? l.h : (l.h == 0 ? 0 : l.h - 1);
  const std::size_t ow = horizontal ? (l.w == 0 ? 0 : l.w - 1) : l.w;
  const std::size_t step = horizontal ? 1 : l.w;
  const std::size_t planes = l.n * l.c;
  std::vector<float> out(planes * oh * ow);
  auto x = input.data();
  for (std::size_t p = 0; p < planes; ++p) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t xi = 0; xi < ow; ++xi) {
        const std::size_t src = p * l.plane() + y * l.w + xi;
        out[(p * oh + y) * ow + xi] = x[src + step] - x[src];
      }
    }
  }
  return Tensor::make_result(l.shape_with(l.c, oh, ow), std::move(out), {input},
                             [l, oh, ow, step, planes](detail::Node& self) {
                               detail::Node& a = in_node(self, 0);
                               for (std::size_t p = 0; p < planes; ++p) {
                                 for (std::size_t y = 0; y < oh; ++y) {
                                   for (std::size_t xi = 0; xi < ow; ++xi) {
                                     const float g = self.grad[(p * oh + y) * ow + xi];
                                     const std::size_t src = p * l.plane() + y * l.w + xi;
                                     a.grad[src + step] += g;
                                     a.grad[src] -= g;
                                   }
                                 }
                               }
                             });
}

Tensor relu(const Tensor& x) {
  return unary(x, [](float v) { return v > 0.0f ? v : 0.0f; },
               [](float v, float) { return v > 0.0f ? 1.0f : 0.0f; });
}

Tensor leaky_relu(const Tensor& x, float slope) {
  return unary(x, [slope](float v) { return v > 0.0f ? v : slope * v; },
               [slope](float v, float) { return v > 0.0f ? 1.0f : slope; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(x, [](float v) { return static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(v)))); },
               [](float, float y) { return y * (1.0f - y); });
}

Tensor abs(const Tensor& x) {
  return unary(x, [](float v) { return std::fabs(v); },
               [](float v, float) { return v > 0.0f ? 1.0f : (v < 0.0f ? -1.0f : 0.0f); });
}

Tensor square(const Tensor& x) {
  return unary(x, [](float v) { return v * v; }, [](float v, float) { return 2.0f * v; });
}

Tensor scale(const Tensor& x, float factor) {
  return unary(x, [factor](float v) { return v * factor; }, [factor](float, float) { return factor; });
}

Tensor add_scalar(const Tensor& x, float value) {
  return unary(x, [value](float v) { return v + value; }, [](float, float) { return 1.0f; });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<float> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      detail::Node& in = in_node(self, k);
      if (!in.requires_grad) continue;
      for (std::size_t i = 0; i < self.grad.size(); ++i) in.grad[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<float> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
    detail::Node& x = in_node(self, 0);
    detail::Node& y = in_node(self, 1);
    if (x.requires_grad) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) x.grad[i] += self.grad[i];
    }
    if (y.requires_grad) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) y.grad[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<float> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
    detail::Node& x = in_node(self, 0);
    detail::Node& y = in_node(self, 1);
    if (x.requires_grad) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) x.grad[i] += self.grad[i] * y.data[i];
    }
    if (y.requires_grad) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) y.grad[i] += self.grad[i] * x.data[i];
    }
  });
}

Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (float v : x.data()) acc += v;
  return Tensor::make_result({}, {static_cast<float>(acc)}, {x}, [](detail::Node& self) {
    detail::Node& a = in_node(self, 0);
    const float g = self.grad[0];
    for (float& v : a.grad) v += g;
  });
}

Tensor mean(const Tensor& x) {
  if (x.numel() == 0) throw ShapeError("mean of an empty tensor");
  double acc = 0.0;
  for (float v : x.data()) acc += v;
  const double n = static_cast<double>(x.numel());
  return Tensor::make_result({}, {static_cast<float>(acc / n)}, {x}, [n](detail::Node& self) {
    detail::Node& a = in_node(self, 0);
    const float g = static_cast<float>(self.grad[0] / n);
    for (float& v : a.grad) v += g;
  });
}

}  // namespace lle::ag
