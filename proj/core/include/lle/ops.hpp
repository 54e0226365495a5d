#pragma once

#include <cstdint>
#include <random>

#include "lle/tensor.hpp"

namespace lle::ag {

// Image tensors are C x H x W or N x C x H x W. Every op below accepts either
// rank and returns the rank it was given.

/// Learnable convolution: kernel OC x IC x KH x KW, bias OC.
struct ConvParams {
  Tensor kernel;
  Tensor bias;
  std::size_t stride = 1;
  std::size_t padding = 1;

  std::size_t out_channels() const { return kernel.dim(0); }
  std::size_t in_channels() const { return kernel.dim(1); }
  std::size_t kernel_size() const { return kernel.dim(2); }
};

/// Glorot-uniform kernel in +-sqrt(6 / (fan_in + fan_out)), zero bias.
ConvParams make_conv(std::size_t in_channels, std::size_t out_channels, std::size_t kernel_size,
                     std::size_t stride, std::size_t padding, std::mt19937_64& rng);

/// floor((in + 2 pad - k) / stride) + 1
std::size_t conv_output_extent(std::size_t in, std::size_t kernel, std::size_t stride,
                               std::size_t padding);

/// Cross-correlation (no kernel flip).
Tensor conv2d(const Tensor& input, const ConvParams& p);
/// 2x2 window, stride 2; ties go to the first element in row-major order.
Tensor max_pool2(const Tensor& input);
/// Nearest-neighbour 2x replication.
Tensor upsample2(const Tensor& input);
Tensor concat_channels(const Tensor& a, const Tensor& b);

enum class Axis { Horizontal, Vertical };
/// x[i+1] - x[i] along the chosen spatial axis; the extent shrinks by one.
Tensor forward_diff(const Tensor& input, Axis axis);

Tensor relu(const Tensor& x);
Tensor leaky_relu(const Tensor& x, float slope);
Tensor sigmoid(const Tensor& x);
Tensor abs(const Tensor& x);
Tensor square(const Tensor& x);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, float factor);
Tensor add_scalar(const Tensor& x, float value);

/// Rank-0 reductions. Accumulation is in double.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

}  // namespace lle::ag
