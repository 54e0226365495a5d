#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lle/ops.hpp"

namespace lle {

/// A parameter tensor with its checkpoint name.
struct NamedParam {
  std::string name;
  ag::Tensor tensor;
};

/// One row of the refinement network's layer table.
struct LayerRow {
  std::string name;
  std::string io;  // e.g. "x_9, x_5/x_10"
  std::size_t out_height = 0;
  std::size_t out_width = 0;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;

  friend bool operator==(const LayerRow&, const LayerRow&) = default;
};

/// Encoder-decoder refinement network with four skip connections.
///
///   conv1, conv2          full resolution
///   down1..down4          two 3x3 convs then 2x2 max-pool
///   conv3, conv4          bottleneck at 1/16 resolution
///   up1..up4              nearest 2x upsample then one 3x3 conv
///   fusion1..fusion4      concat(decoder, encoder skip) then two 3x3 convs
///   conv5                 3x3 conv to RGB, sigmoid
///
/// Every channel count is the reference width (32 ... 512) times
/// `width_scale`, rounded, with a floor of 1.
class GeneratorModel {
 public:
  static constexpr float kLeakySlope = 0.2f;

  explicit GeneratorModel(double width_scale = 1.0, std::uint64_t seed = 0);

  double width_scale() const { return width_scale_; }

  /// Input and output are 3xHxW or Nx3xHxW with H, W divisible by 16.
  /// When `trace` is non-null it receives x_1 ... x_16 in order.
  ag::Tensor forward(const ag::Tensor& input, std::vector<ag::Tensor>* trace = nullptr) const;

  /// Walks the layers by shape arithmetic for an input of the given extent.
  std::vector<LayerRow> layer_table(std::size_t height, std::size_t width) const;

  std::vector<NamedParam> parameters() const;

 private:
  struct DoubleConv {
    ag::ConvParams first, second;
  };

  double width_scale_;
  ag::ConvParams conv1_, conv2_, conv3_, conv4_, conv5_;
  DoubleConv down_[4];
  ag::ConvParams up_[4];
  DoubleConv fusion_[4];
};

/// Reference channel count scaled by `width_scale` (rounded, at least 1).
std::size_t scaled_channels(std::size_t reference, double width_scale);

/// Fully convolutional critic: stride-2 3x3 convolutions with leaky-relu
/// between them, ending in a one-channel score map.
class DiscriminatorModel {
 public:
  static constexpr float kLeakySlope = 0.2f;

  /// `widths` are reference widths; all but the last are scaled by
  /// `width_scale`. The last must be 1.
  explicit DiscriminatorModel(double width_scale = 1.0, std::uint64_t seed = 1,
                              std::vector<std::size_t> widths = {32, 64, 128, 256, 1});

  /// One-channel score map (1xhxw or Nx1xhxw).
  ag::Tensor forward(const ag::Tensor& img) const;
  /// Spatial mean of the score map: the scalar critic value.
  ag::Tensor score(const ag::Tensor& img) const;

  /// Smallest accepted spatial extent: 2^layers, where the map is 1x1.
  std::size_t min_input_extent() const;
  std::size_t layer_count() const { return layers_.size(); }

  std::vector<NamedParam> parameters() const;

 private:
  std::vector<ag::ConvParams> layers_;
};

/// Generator and critic trained together; the unit a checkpoint stores.
struct ModelPair {
  GeneratorModel generator;
  DiscriminatorModel discriminator;

  explicit ModelPair(double width_scale = 1.0, std::uint64_t seed = 0)
      : generator(width_scale, seed), discriminator(width_scale, seed + 1) {}
};

}  // namespace lle
