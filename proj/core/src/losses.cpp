#include "lle/losses.hpp"

#include <random>

#include "lle/error.hpp"

namespace lle {

namespace {

void require_same_shape(const ag::Tensor& a, const ag::Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + ag::shape_to_string(a.shape()) + " vs " +
                     ag::shape_to_string(b.shape()));
  }
}

// ((a - b) - 1)^2 + (b - a)^2
ag::Tensor relativistic(const ag::Tensor& a, const ag::Tensor& b) {
  ag::Tensor diff = ag::sub(a, b);
  return ag::add(ag::square(ag::add_scalar(diff, -1.0f)), ag::square(ag::scale(diff, -1.0f)));
}

}  // namespace

void LossWeights::validate() const {
  if (w_per < 0.0 || w_tv < 0.0 || w_adv < 0.0) throw ArgumentError("loss weights must be non-negative");
}

double total_loss(const LossBreakdown& parts, const LossWeights& w) {
  return parts.l_rec + w.w_per * parts.l_per + w.w_tv * parts.l_tv + w.w_adv * parts.l_adv_g;
}

FeatureExtractor::FeatureExtractor(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  layers_.push_back(ag::make_conv(3, 8, 3, 1, 1, rng));
  layers_.push_back(ag::make_conv(8, 16, 3, 1, 1, rng));
  layers_.push_back(ag::make_conv(16, 16, 3, 1, 1, rng));
  layers_.push_back(ag::make_conv(16, 16, 3, 1, 1, rng));
  for (auto& l : layers_) {
    l.kernel.set_requires_grad(false);
    l.bias.set_requires_grad(false);
  }
}

ag::Tensor FeatureExtractor::features(const ag::Tensor& img) const {
  ag::Tensor t = ag::max_pool2(ag::relu(ag::conv2d(img, layers_[0])));
  t = ag::max_pool2(ag::relu(ag::conv2d(t, layers_[1])));
  t = ag::relu(ag::conv2d(t, layers_[2]));
  return ag::conv2d(t, layers_[3]);
}

std::vector<ag::Tensor> FeatureExtractor::weights() const {
  std::vector<ag::Tensor> out;
  for (const auto& l : layers_) {
    out.push_back(l.kernel);
    out.push_back(l.bias);
  }
  return out;
}

ag::Tensor loss_rec(const ag::Tensor& refined, const ag::Tensor& pre) {
  require_same_shape(refined, pre, "loss_rec");
  return ag::mean(ag::abs(ag::sub(refined, pre)));
}

ag::Tensor loss_perceptual(const ag::Tensor& refined, const ag::Tensor& pre, const FeatureExtractor& phi) {
  require_same_shape(refined, pre, "loss_perceptual");
  return ag::mean(ag::square(ag::sub(phi.features(refined), phi.features(pre))));
}

ag::Tensor loss_tv(const ag::Tensor& refined) {
  const auto& s = refined.shape();
  if (s.size() < 2) throw ShapeError("loss_tv needs a spatial tensor");
  const std::size_t h = s[s.size() - 2], w = s[s.size() - 1];
  if (h < 2 && w < 2) throw ShapeError("loss_tv is undefined on a 1x1 image");
  ag::Tensor total;
  if (w >= 2) total = ag::mean(ag::abs(ag::forward_diff(refined, ag::Axis::Horizontal)));
  if (h >= 2) {
    ag::Tensor v = ag::mean(ag::abs(ag::forward_diff(refined, ag::Axis::Vertical)));
    total = total.defined() ? ag::add(total, v) : v;
  }
  return total;
}

AdversarialLoss loss_adversarial(const ag::Tensor& d_fake, const ag::Tensor& d_real) {
  if (d_fake.numel() != 1 || d_real.numel() != 1) throw ShapeError("adversarial loss expects scalar critic values");
  return {relativistic(d_fake, d_real.detach()), relativistic(d_real, d_fake)};
}

AdversarialValues adversarial_values(double d_fake, double d_real) {
  const double t = d_fake - d_real;
  return {(t - 1.0) * (t - 1.0) + t * t, (-t - 1.0) * (-t - 1.0) + t * t};
}

}  // namespace lle
