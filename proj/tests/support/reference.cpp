#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lle::testing {

RefTensor ref_from(const ag::Tensor& t) {
  const auto& s = t.shape();
  RefTensor r;
  if (s.size() == 4) {
    r = RefTensor(s[0], s[1], s[2], s[3]);
  } else if (s.size() == 3) {
    r = RefTensor(1, s[0], s[1], s[2]);
  } else {
    r = RefTensor(1, 1, 1, t.numel());
  }
  for (std::size_t i = 0; i < t.numel(); ++i) r.v[i] = t.data()[i];
  return r;
}

RefTensor ref_conv2d(const RefTensor& x, const ag::Tensor& kernel, const ag::Tensor& bias, std::size_t stride,
                     std::size_t pad) {
  const std::size_t oc = kernel.dim(0), ic = kernel.dim(1), kh = kernel.dim(2), kw = kernel.dim(3);
  if (ic != x.c) throw std::invalid_argument("ref_conv2d: channel mismatch");
  const std::size_t oh = (x.h + 2 * pad - kh) / stride + 1, ow = (x.w + 2 * pad - kw) / stride + 1;
  RefTensor out(x.n, oc, oh, ow);
  auto k = kernel.data();
  for (std::size_t b = 0; b < x.n; ++b) {
    for (std::size_t o = 0; o < oc; ++o) {
      for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t xx = 0; xx < ow; ++xx) {
          double acc = bias.data()[o];
          for (std::size_t i = 0; i < ic; ++i) {
            for (std::size_t ky = 0; ky < kh; ++ky) {
              for (std::size_t kx = 0; kx < kw; ++kx) {
                const long iy = static_cast<long>(y * stride + ky) - static_cast<long>(pad);
                const long ix = static_cast<long>(xx * stride + kx) - static_cast<long>(pad);
                if (iy < 0 || ix < 0 || iy >= static_cast<long>(x.h) || ix >= static_cast<long>(x.w)) continue;
                acc += k[((o * ic + i) * kh + ky) * kw + kx] *
                       x.at(b, i, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix));
              }
            }
          }
          out.at(b, o, y, xx) = acc;
        }
      }
    }
  }
  return out;
}

RefTensor ref_max_pool2(const RefTensor& x, Pattern* pattern) {
  RefTensor out(x.n, x.c, x.h / 2, x.w / 2);
  for (std::size_t b = 0; b < x.n; ++b) {
    for (std::size_t c = 0; c < x.c; ++c) {
      for (std::size_t y = 0; y < out.h; ++y) {
        for (std::size_t xx = 0; xx < out.w; ++xx) {
          const double cand[4] = {x.at(b, c, 2 * y, 2 * xx), x.at(b, c, 2 * y, 2 * xx + 1),
                                  x.at(b, c, 2 * y + 1, 2 * xx), x.at(b, c, 2 * y + 1, 2 * xx + 1)};
          std::uint8_t best = 0;
          for (std::uint8_t k = 1; k < 4; ++k) {
            if (cand[k] > cand[best]) best = k;
          }
          out.at(b, c, y, xx) = cand[best];
          if (pattern) pattern->push_back(best);
        }
      }
    }
  }
  return out;
}

RefTensor ref_relu(const RefTensor& x, Pattern* pattern) {
  RefTensor out = x;
  for (auto& v : out.v) {
    if (pattern) pattern->push_back(v > 0.0 ? 1 : 0);
    v = v > 0.0 ? v : 0.0;
  }
  return out;
}

RefTensor ref_upsample2(const RefTensor& x) {
  RefTensor out(x.n, x.c, x.h * 2, x.w * 2);
  for (std::size_t b = 0; b < x.n; ++b) {
    for (std::size_t c = 0; c < x.c; ++c) {
      for (std::size_t y = 0; y < out.h; ++y) {
        for (std::size_t xx = 0; xx < out.w; ++xx) out.at(b, c, y, xx) = x.at(b, c, y / 2, xx / 2);
      }
    }
  }
  return out;
}

RefTensor ref_concat(const RefTensor& a, const RefTensor& b) {
  RefTensor out(a.n, a.c + b.c, a.h, a.w);
  for (std::size_t n = 0; n < a.n; ++n) {
    for (std::size_t c = 0; c < out.c; ++c) {
      for (std::size_t y = 0; y < a.h; ++y) {
        for (std::size_t x = 0; x < a.w; ++x) {
          out.at(n, c, y, x) = c < a.c ? a.at(n, c, y, x) : b.at(n, c - a.c, y, x);
        }
      }
    }
  }
  return out;
}

RefTensor ref_forward_diff(const RefTensor& x, bool horizontal) {
  RefTensor out(x.n, x.c, horizontal ? x.h : x.h - 1, horizontal ? x.w - 1 : x.w);
  for (std::size_t b = 0; b < x.n; ++b) {
    for (std::size_t c = 0; c < x.c; ++c) {
      for (std::size_t y = 0; y < out.h; ++y) {
        for (std::size_t xx = 0; xx < out.w; ++xx) {
          out.at(b, c, y, xx) =
              horizontal ? x.at(b, c, y, xx + 1) - x.at(b, c, y, xx) : x.at(b, c, y + 1, xx) - x.at(b, c, y, xx);
        }
      }
    }
  }
  return out;
}

RefTensor ref_map(const RefTensor& x, const std::function<double(double)>& f) {
  RefTensor out = x;
  for (auto& v : out.v) v = f(v);
  return out;
}

RefTensor ref_zip(const RefTensor& a, const RefTensor& b, const std::function<double(double, double)>& f) {
  RefTensor out = a;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = f(a.v[i], b.v[i]);
  return out;
}

double ref_mean(const RefTensor& x) {
  double acc = 0.0;
  for (double v : x.v) acc += v;
  return acc / static_cast<double>(x.v.size());
}

double ref_loss_rec(const RefTensor& y, const RefTensor& pre) {
  return ref_mean(ref_zip(y, pre, [](double a, double b) { return std::fabs(a - b); }));
}

double ref_loss_tv(const RefTensor& y) {
  auto absmean = [](const RefTensor& d) { return ref_mean(ref_map(d, [](double v) { return std::fabs(v); })); };
  double tv = 0.0;
  if (y.w > 1) tv += absmean(ref_forward_diff(y, true));
  if (y.h > 1) tv += absmean(ref_forward_diff(y, false));
  return tv;
}

RefTensor ref_features(const RefTensor& x, const FeatureExtractor& phi, Pattern* pattern) {
  const auto w = phi.weights();
  RefTensor t = ref_max_pool2(ref_relu(ref_conv2d(x, w[0], w[1], 1, 1), pattern), pattern);
  t = ref_max_pool2(ref_relu(ref_conv2d(t, w[2], w[3], 1, 1), pattern), pattern);
  t = ref_relu(ref_conv2d(t, w[4], w[5], 1, 1), pattern);
  return ref_conv2d(t, w[6], w[7], 1, 1);
}

double ref_loss_perceptual(const RefTensor& y, const RefTensor& pre, const FeatureExtractor& phi, Pattern* pattern) {
  return ref_mean(ref_zip(ref_features(y, phi, pattern), ref_features(pre, phi, pattern), [](double a, double b) {
    return (a - b) * (a - b);
  }));
}

double ref_critic_score(const RefTensor& x, const DiscriminatorModel& critic) {
  const auto params = critic.parameters();
  RefTensor t = x;
  for (std::size_t i = 0; i < params.size(); i += 2) {
    t = ref_conv2d(t, params[i].tensor, params[i + 1].tensor, 2, 1);
    if (i + 2 < params.size()) t = ref_map(t, [](double v) { return v > 0.0 ? v : 0.2 * v; });
  }
  return ref_mean(t);
}

std::pair<double, double> ref_adversarial(double d_fake, double d_real) {
  const double g = (d_fake - d_real - 1.0) * (d_fake - d_real - 1.0) + (d_real - d_fake) * (d_real - d_fake);
  const double d = (d_real - d_fake - 1.0) * (d_real - d_fake - 1.0) + (d_fake - d_real) * (d_fake - d_real);
  return {g, d};
}

}  // namespace lle::testing
