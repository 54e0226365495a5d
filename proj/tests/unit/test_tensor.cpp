#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "lle/error.hpp"
#include "lle/ops.hpp"

using namespace lle;
using namespace lle::ag;
using lle::testing::random_tensor;

namespace {

Tensor t(Shape s, std::vector<float> v, bool grad = false) { return Tensor::from_data(std::move(s), std::move(v), grad); }

ConvParams conv(Shape k, std::vector<float> kv, std::vector<float> b, std::size_t stride = 1, std::size_t pad = 1) {
  const std::size_t oc = k[0];
  return {t(std::move(k), std::move(kv)), t({oc}, std::move(b)), stride, pad};
}

std::vector<float> values(const Tensor& x) { return {x.data().begin(), x.data().end()}; }

}  // namespace

TEST(Tensor, Construction) {
  EXPECT_EQ(Tensor::zeros({2, 3}).numel(), 6u);
  EXPECT_THROW(t({2, 2}, {1, 2, 3}), ShapeError);
  EXPECT_FLOAT_EQ(Tensor::scalar(2.5f).item(), 2.5f);
  EXPECT_EQ(Tensor::scalar(1).rank(), 0u);
  EXPECT_THROW(Tensor::zeros({2}).item(), ShapeError);
}

TEST(Conv2d, IdentityKernel) {
  const Tensor x = t({1, 2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(values(conv2d(x, conv({1, 1, 1, 1}, {1}, {0}, 1, 0))), values(x));
}

TEST(Conv2d, ZeroInputGivesBias) {
  const Tensor out = conv2d(Tensor::zeros({2, 4, 4}), conv({3, 2, 3, 3}, std::vector<float>(54, 0.7f), {0.5f, -1, 2}));
  ASSERT_EQ(out.shape(), (Shape{3, 4, 4}));
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_FLOAT_EQ(out.data()[i], 0.5f);
    EXPECT_FLOAT_EQ(out.data()[16 + i], -1.0f);
    EXPECT_FLOAT_EQ(out.data()[32 + i], 2.0f);
  }
}

TEST(Conv2d, AveragingKernelOnIdentityPattern) {
  const Tensor x = t({1, 3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  const Tensor out = conv2d(x, conv({1, 1, 3, 3}, std::vector<float>(9, 1.0f / 9.0f), {0}));
  EXPECT_NEAR(out.data()[4], 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(out.data()[0], 2.0 / 9.0, 1e-6);
}

TEST(Conv2d, ShapeAlgebraProperty) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> ext(3, 12), ch(1, 3), k(1, 3), st(1, 3), pd(0, 2);
  for (int i = 0; i < 40; ++i) {
    const std::size_t h = ext(rng), w = ext(rng), ic = ch(rng), oc = ch(rng), ks = k(rng), s = st(rng), p = pd(rng);
    const Tensor x = random_tensor({ic, h, w}, rng, -1, 1, false);
    const ConvParams c{random_tensor({oc, ic, ks, ks}, rng, -1, 1, false), Tensor::zeros({oc}), s, p};
    const Tensor y = conv2d(x, c);
    EXPECT_EQ(y.shape(), (Shape{oc, (h + 2 * p - ks) / s + 1, (w + 2 * p - ks) / s + 1}));
    EXPECT_EQ(conv_output_extent(h, ks, s, p), (h + 2 * p - ks) / s + 1);
  }
}

TEST(Conv2d, LinearWithoutBias) {
  std::mt19937_64 rng(2);
  const ConvParams c{random_tensor({3, 2, 3, 3}, rng, -1, 1, false), Tensor::zeros({3}), 1, 1};
  for (int i = 0; i < 10; ++i) {
    const Tensor a = random_tensor({2, 5, 5}, rng, -1, 1, false), b = random_tensor({2, 5, 5}, rng, -1, 1, false);
    const float alpha = 0.7f, beta = -1.3f;
    const Tensor lhs = conv2d(add(scale(a, alpha), scale(b, beta)), c);
    const Tensor ca = conv2d(a, c), cb = conv2d(b, c);
    for (std::size_t j = 0; j < lhs.numel(); ++j) {
      EXPECT_NEAR(lhs.data()[j], alpha * ca.data()[j] + beta * cb.data()[j], 1e-5);
    }
  }
}

TEST(Conv2d, Errors) {
  EXPECT_THROW(conv2d(Tensor::zeros({2, 4, 4}), conv({1, 3, 3, 3}, std::vector<float>(27), {0})), ShapeError);
  EXPECT_THROW(conv2d(Tensor::zeros({1, 2, 2}), conv({1, 1, 5, 5}, std::vector<float>(25), {0}, 1, 0)), ShapeError);
}

TEST(MaxPool, Examples) {
  EXPECT_EQ(values(max_pool2(t({1, 2, 2}, {1, 2, 3, 4}))), std::vector<float>{4});
  EXPECT_EQ(values(max_pool2(Tensor::full({2, 4, 4}, 0.3f))), std::vector<float>(8, 0.3f));
  EXPECT_THROW(max_pool2(Tensor::zeros({1, 3, 4})), ShapeError);
}

TEST(MaxPool, TieRoutesToFirst) {
  const Tensor x = t({1, 2, 2}, {5, 5, 5, 5}, true);
  sum(max_pool2(x)).backward();
  EXPECT_EQ(std::vector<float>(x.grad().begin(), x.grad().end()), (std::vector<float>{1, 0, 0, 0}));
}

TEST(Upsample, Examples) {
  EXPECT_EQ(values(upsample2(t({1, 1, 1}, {1}))), std::vector<float>(4, 1));
  EXPECT_EQ(values(upsample2(t({1, 2, 2}, {1, 2, 3, 4}))),
            (std::vector<float>{1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4}));
  const Tensor x = t({1, 1, 1}, {2}, true);
  sum(upsample2(x)).backward();
  EXPECT_FLOAT_EQ(x.grad()[0], 4.0f);
}

TEST(Concat, Channels) {
  EXPECT_EQ(concat_channels(Tensor::zeros({256, 16, 16}), Tensor::zeros({128, 16, 16})).shape(), (Shape{384, 16, 16}));
  EXPECT_EQ(concat_channels(Tensor::zeros({64, 64, 64}), Tensor::zeros({32, 64, 64})).shape(), (Shape{96, 64, 64}));
  const Tensor a = t({1, 1, 2}, {1, 2});
  EXPECT_EQ(values(concat_channels(a, Tensor::zeros({0, 1, 2}))), values(a));
  EXPECT_THROW(concat_channels(Tensor::zeros({1, 2, 2}), Tensor::zeros({1, 2, 3})), ShapeError);
}

TEST(Activations, Examples) {
  EXPECT_EQ(values(relu(t({2}, {-1, 2}))), (std::vector<float>{0, 2}));
  EXPECT_FLOAT_EQ(leaky_relu(t({1}, {-1}), 0.2f).data()[0], -0.2f);
  EXPECT_FLOAT_EQ(sigmoid(t({1}, {0})).data()[0], 0.5f);
}

TEST(Backward, LinearAndQuadratic) {
  const Tensor x = t({3}, {1, -2, 4});
  const Tensor w = t({3}, {0.5f, 0.5f, 0.5f}, true);
  sum(mul(w, x)).backward();
  EXPECT_EQ(std::vector<float>(w.grad().begin(), w.grad().end()), values(x));

  const Tensor v = t({1}, {3}, true);
  sum(square(v)).backward();
  EXPECT_FLOAT_EQ(v.grad()[0], 6.0f);
}

TEST(Backward, ZeroesUnlessAccumulating) {
  const Tensor v = t({1}, {3}, true);
  sum(square(v)).backward();
  sum(square(v)).backward();
  EXPECT_FLOAT_EQ(v.grad()[0], 6.0f);
  sum(square(v)).backward(true);
  EXPECT_FLOAT_EQ(v.grad()[0], 12.0f);
}

TEST(Backward, Errors) {
  const Tensor v = t({2}, {1, 2}, true);
  EXPECT_THROW(square(v).backward(), GraphError);
  const Tensor loss = sum(square(v));
  loss.backward();
  EXPECT_THROW(loss.backward(), GraphError);
}

TEST(Backward, DetachStopsGradient) {
  const Tensor v = t({1}, {2}, true);
  sum(mul(v, square(v).detach())).backward();
  EXPECT_FLOAT_EQ(v.grad()[0], 4.0f);
}

TEST(Backward, SharedSubgraphAccumulates) {
  const Tensor v = t({1}, {2}, true);
  const Tensor s = square(v);
  sum(add(s, s)).backward();
  EXPECT_FLOAT_EQ(v.grad()[0], 8.0f);
}
