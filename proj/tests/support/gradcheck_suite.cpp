#include "gradcheck_suite.hpp"

#include <cmath>

#include "lle/losses.hpp"
#include "lle/ops.hpp"
#include "lle/refine_net.hpp"
#include "reference.hpp"

namespace lle::testing {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Samples kept at least `gap` from zero so relu/abs stay smooth under the probe step.
ag::Tensor away_from_zero(const ag::Shape& shape, std::mt19937_64& rng, float gap = 0.05f) {
  ag::Tensor t = random_tensor(shape, rng);
  for (auto& v : t.mutable_data()) {
    if (std::fabs(v) < gap) v = v < 0 ? v - gap : v + gap;
  }
  return t;
}

// Each 2x2 window gets four distinct offsets so its maximum leads by >= 0.01.
ag::Tensor distinct_pool_input(std::size_t c, std::size_t h, std::size_t w, std::mt19937_64& rng) {
  ag::Tensor t = random_tensor({c, h, w}, rng);
  auto d = t.mutable_data();
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        float& v = d[(ch * h + y) * w + x];
        v = std::round(v * 20.0f) / 20.0f + 0.01f * static_cast<float>(2 * (y % 2) + (x % 2));
      }
    }
  }
  return t;
}

using Checks = std::vector<LabeledCheck>;

Checks check_conv2d(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  auto x = random_tensor({2, 4, 4}, rng);
  ag::ConvParams p{random_tensor({3, 2, 3, 3}, rng), random_tensor({3}, rng), 1, 1};
  add(grad_check_op(
      {x, p.kernel, p.bias}, [&](const Leaves& l) { return ag::conv2d(l[0], p); },
      [&](const Leaves& l) { return ref_conv2d(ref_from(l[0]), p.kernel, p.bias, 1, 1); }, seed));
  return checks;
}

Checks check_conv2d_stride2_batched(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  auto x = random_tensor({2, 2, 4, 4}, rng);
  ag::ConvParams p{random_tensor({2, 2, 3, 3}, rng), random_tensor({2}, rng), 2, 1};
  add(grad_check_op(
      {x, p.kernel, p.bias}, [&](const Leaves& l) { return ag::conv2d(l[0], p); },
      [&](const Leaves& l) { return ref_conv2d(ref_from(l[0]), p.kernel, p.bias, 2, 1); }, seed));
  return checks;
}

Checks check_max_pool(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  auto x = distinct_pool_input(2, 4, 4, rng);
  add(grad_check_op(
      {x}, [](const Leaves& l) { return ag::max_pool2(l[0]); },
      [](const Leaves& l) { return ref_max_pool2(ref_from(l[0])); }, seed));
  return checks;
}

Checks check_upsample(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  auto x = random_tensor({2, 4, 4}, rng);
  add(grad_check_op(
      {x}, [](const Leaves& l) { return ag::upsample2(l[0]); },
      [](const Leaves& l) { return ref_upsample2(ref_from(l[0])); }, seed));
  return checks;
}

Checks check_concat_channels(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  auto a = random_tensor({2, 4, 4}, rng), b = random_tensor({3, 4, 4}, rng);
  add(grad_check_op(
      {a, b}, [](const Leaves& l) { return ag::concat_channels(l[0], l[1]); },
      [](const Leaves& l) { return ref_concat(ref_from(l[0]), ref_from(l[1])); }, seed));
  return checks;
}

Checks check_forward_diff(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  auto x = random_tensor({1, 2, 4, 4}, rng);
  for (bool horizontal : {true, false}) {
    const auto axis = horizontal ? ag::Axis::Horizontal : ag::Axis::Vertical;
    add(grad_check_op(
        {x}, [axis](const Leaves& l) { return ag::forward_diff(l[0], axis); },
        [horizontal](const Leaves& l) { return ref_forward_diff(ref_from(l[0]), horizontal); }, seed));
  }
  return checks;
}

Checks check_unary(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  auto x = away_from_zero({2, 4, 4}, rng);
  struct Case {
    const char* name;
    std::function<ag::Tensor(const ag::Tensor&)> op;
    std::function<double(double)> ref;
  };
  const std::vector<Case> cases = {
      {"relu", [](const ag::Tensor& t) { return ag::relu(t); }, [](double v) { return v > 0 ? v : 0.0; }},
      {"leaky_relu", [](const ag::Tensor& t) { return ag::leaky_relu(t, 0.2f); },
       [](double v) { return v > 0 ? v : 0.2 * v; }},
      {"sigmoid", [](const ag::Tensor& t) { return ag::sigmoid(t); }, sigmoid},
      {"abs", [](const ag::Tensor& t) { return ag::abs(t); }, [](double v) { return std::fabs(v); }},
      {"square", [](const ag::Tensor& t) { return ag::square(t); }, [](double v) { return v * v; }},
      {"scale", [](const ag::Tensor& t) { return ag::scale(t, -1.5f); }, [](double v) { return -1.5 * v; }},
      {"add_scalar", [](const ag::Tensor& t) { return ag::add_scalar(t, 0.25f); }, [](double v) { return v + 0.25; }},
  };
  for (const auto& c : cases) {
    add(grad_check_op(
                  {x}, [&](const Leaves& l) { return c.op(l[0]); },
                  [&](const Leaves& l) { return ref_map(ref_from(l[0]), c.ref); }, seed),
              c.name);
  }
  return checks;
}

Checks check_binary(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  auto a = random_tensor({2, 4, 4}, rng), b = random_tensor({2, 4, 4}, rng);
  struct Case {
    const char* name;
    std::function<ag::Tensor(const ag::Tensor&, const ag::Tensor&)> op;
    std::function<double(double, double)> ref;
  };
  const std::vector<Case> cases = {
      {"add", [](const ag::Tensor& p, const ag::Tensor& q) { return ag::add(p, q); }, std::plus<double>()},
      {"sub", [](const ag::Tensor& p, const ag::Tensor& q) { return ag::sub(p, q); }, std::minus<double>()},
      {"mul", [](const ag::Tensor& p, const ag::Tensor& q) { return ag::mul(p, q); }, std::multiplies<double>()},
  };
  for (const auto& c : cases) {
    add(grad_check_op(
                  {a, b}, [&](const Leaves& l) { return c.op(l[0], l[1]); },
                  [&](const Leaves& l) { return ref_zip(ref_from(l[0]), ref_from(l[1]), c.ref); }, seed),
              c.name);
  }
  return checks;
}

Checks check_reductions(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  auto x = random_tensor({2, 4, 4}, rng);
  auto ref_sum = [&] {
    double acc = 0.0;
    for (float v : x.data()) acc += v;
    return acc;
  };
  add(grad_check({x}, [&] { return ag::sum(x); }, ref_sum), "sum");
  add(grad_check({x}, [&] { return ag::mean(x); }, [&] { return ref_mean(ref_from(x)); }), "mean");
  return checks;
}

Checks check_composite(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  auto x = random_tensor({1, 2, 4, 4}, rng);
  ag::ConvParams c1{random_tensor({3, 2, 3, 3}, rng), random_tensor({3}, rng), 1, 1};
  ag::ConvParams c2{random_tensor({2, 5, 3, 3}, rng), random_tensor({2}, rng), 1, 1};
  auto net = [&](const Leaves& l) {
    ag::Tensor h = ag::sigmoid(ag::conv2d(l[0], c1));
    ag::Tensor u = ag::upsample2(ag::max_pool2(h));
    return ag::sigmoid(ag::conv2d(ag::concat_channels(u, l[0]), c2));
  };
  auto ref = [&](const Leaves& l) {
    RefTensor h = ref_map(ref_conv2d(ref_from(l[0]), c1.kernel, c1.bias, 1, 1), sigmoid);
    RefTensor u = ref_upsample2(ref_max_pool2(h));
    return ref_map(ref_conv2d(ref_concat(u, ref_from(l[0])), c2.kernel, c2.bias, 1, 1), sigmoid);
  };
  // Pool ties are measure-zero for sigmoid outputs of random data; the check
  // would surface one as a large error.
  add(grad_check_op({x, c1.kernel, c1.bias, c2.kernel, c2.bias}, net, ref, seed));
  return checks;
}

Checks check_loss_rec(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  auto y = random_tensor({1, 3, 4, 4}, rng, 0.0f, 1.0f);
  auto pre = random_tensor({1, 3, 4, 4}, rng, 0.0f, 1.0f, false);
  auto d = y.mutable_data();
  for (std::size_t i = 0; i < y.numel(); ++i) {
    if (std::fabs(d[i] - pre.data()[i]) < 0.02f) d[i] = pre.data()[i] + 0.05f;
  }
  add(grad_check({y}, [&] { return loss_rec(y, pre); },
                       [&] { return ref_loss_rec(ref_from(y), ref_from(pre)); }));
  return checks;
}

Checks check_loss_perceptual(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  const FeatureExtractor phi(seed);
  auto y = random_tensor({1, 3, 8, 8}, rng, 0.0f, 1.0f);
  auto pre = random_tensor({1, 3, 8, 8}, rng, 0.0f, 1.0f, false);
  auto pattern = [&] {
    Pattern p;
    ref_loss_perceptual(ref_from(y), ref_from(pre), phi, &p);
    return p;
  };
  const auto r = grad_check(
      {y}, [&] { return loss_perceptual(y, pre, phi); },
      [&] { return ref_loss_perceptual(ref_from(y), ref_from(pre), phi); }, 1e-3, pattern);
  add(r);
  return checks;
}

Checks check_loss_tv(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  // Checkerboard-signed jitter on a ramp keeps every neighbour difference >= 0.05 in magnitude.
  std::vector<float> data(3 * 4 * 4);
  std::uniform_real_distribution<float> u(0.2f, 0.4f);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < 4; ++y) {
      for (std::size_t x = 0; x < 4; ++x) {
        data[(c * 4 + y) * 4 + x] = 0.5f + u(rng) * ((x + y) % 2 ? 1.0f : -1.0f);
      }
    }
  }
  auto img = ag::Tensor::from_data({1, 3, 4, 4}, data, true);
  add(grad_check({img}, [&] { return loss_tv(img); }, [&] { return ref_loss_tv(ref_from(img)); }));
  return checks;
}

Checks check_loss_adversarial_scalars(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  auto fake = random_tensor({}, rng), real = random_tensor({}, rng);
  add(grad_check({fake}, [&] { return loss_adversarial(fake, real.detach()).generator; },
                       [&] { return ref_adversarial(fake.item(), real.item()).first; }),
            "generator");
  add(grad_check({fake, real}, [&] { return loss_adversarial(fake, real).discriminator; },
                       [&] { return ref_adversarial(fake.item(), real.item()).second; }),
            "discriminator");
  return checks;
}

Checks check_loss_adversarial_through_critic(std::uint64_t seed) {
  Checks checks;
  auto add = [&](GradCheckResult r, const char* label = "") { checks.push_back({label, std::move(r)}); };
  std::mt19937_64 rng(seed);
  const DiscriminatorModel critic(0.25, seed, {8, 1});
  auto fake = random_tensor({1, 3, 4, 4}, rng, 0.0f, 1.0f);
  auto real = random_tensor({1, 3, 4, 4}, rng, 0.0f, 1.0f, false);
  add(grad_check(
      {fake}, [&] { return loss_adversarial(critic.score(fake), critic.score(real).detach()).generator; },
      [&] {
        return ref_adversarial(ref_critic_score(ref_from(fake), critic), ref_critic_score(ref_from(real), critic))
            .first;
      }));
  return checks;
}

}  // namespace

bool grad_check_passes(const GradCheckResult& r) {
  return r.max_rel_error <= kGradTolerance && r.forward_error <= kGradForwardTolerance && r.skipped_kinks * 4 <= r.probes;
}

const std::vector<GradCase>& gradient_cases() {
  static const std::vector<GradCase> cases = {
      {"Conv2d", check_conv2d},
      {"Conv2dStride2Batched", check_conv2d_stride2_batched},
      {"MaxPool", check_max_pool},
      {"Upsample", check_upsample},
      {"ConcatChannels", check_concat_channels},
      {"ForwardDiff", check_forward_diff},
      {"Unary", check_unary},
      {"Binary", check_binary},
      {"Reductions", check_reductions},
      {"Composite", check_composite},
      {"LossRec", check_loss_rec},
      {"LossPerceptual", check_loss_perceptual},
      {"LossTv", check_loss_tv},
      {"LossAdversarialScalars", check_loss_adversarial_scalars},
      {"LossAdversarialThroughCritic", check_loss_adversarial_through_critic},
  };
  return cases;
}

}  // namespace lle::testing
