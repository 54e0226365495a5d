#include "lle/refine_net.hpp"

#include <cmath>
#include <random>

#include "lle/error.hpp"

namespace lle {

namespace {

constexpr std::size_t kEncoderWidths[5] = {32, 32, 64, 128, 256};  // conv1/2 then down1..4 outputs
constexpr std::size_t kBottleneck = 512;

ag::ConvParams conv3x3(std::size_t in, std::size_t out, std::mt19937_64& rng, std::size_t stride = 1) {
  return ag::make_conv(in, out, 3, stride, 1, rng);
}

ag::Tensor conv_act(const ag::Tensor& x, const ag::ConvParams& p, float slope) {
  return ag::leaky_relu(ag::conv2d(x, p), slope);
}

std::string x_name(int i) { return "x_" + std::to_string(i); }

void push_conv(std::vector<NamedParam>& out, const std::string& name, const ag::ConvParams& p) {
  out.push_back({name + ".weight", p.kernel});
  out.push_back({name + ".bias", p.bias});
}

}  // namespace

std::size_t scaled_channels(std::size_t reference, double width_scale) {
  const auto v = static_cast<long long>(std::llround(static_cast<double>(reference) * width_scale));
  return v < 1 ? 1 : static_cast<std::size_t>(v);
}

GeneratorModel::GeneratorModel(double width_scale, std::uint64_t seed) : width_scale_(width_scale) {
  if (!(width_scale > 0.0)) throw ArgumentError("width_scale must be positive");
  std::mt19937_64 rng(seed);
  auto ch = [&](std::size_t reference) { return scaled_channels(reference, width_scale); };

  conv1_ = conv3x3(3, ch(32), rng);
  conv2_ = conv3x3(ch(32), ch(32), rng);
  for (int i = 0; i < 4; ++i) {
    down_[i].first = conv3x3(ch(kEncoderWidths[i]), ch(kEncoderWidths[i + 1]), rng);
    down_[i].second = conv3x3(ch(kEncoderWidths[i + 1]), ch(kEncoderWidths[i + 1]), rng);
  }
  conv3_ = conv3x3(ch(256), ch(kBottleneck), rng);
  conv4_ = conv3x3(ch(kBottleneck), ch(kBottleneck), rng);

  // Decoder level i upsamples from `from` and fuses with encoder output of width `skip`.
  std::size_t from = ch(kBottleneck);
  for (int i = 0; i < 4; ++i) {
    const std::size_t out = ch(kEncoderWidths[4 - i]);
    const std::size_t skip = ch(kEncoderWidths[3 - i]);
    up_[i] = conv3x3(from, out, rng);
    fusion_[i].first = conv3x3(out + skip, out, rng);
    fusion_[i].second = conv3x3(out, out, rng);
    from = out;
  }
  conv5_ = conv3x3(from, 3, rng);
}

ag::Tensor GeneratorModel::forward(const ag::Tensor& input, std::vector<ag::Tensor>* trace) const {
  const auto& s = input.shape();
  if (s.size() != 3 && s.size() != 4) {
    throw ShapeError("generator expects 3xHxW or Nx3xHxW input, got " + ag::shape_to_string(s));
  }
  const std::size_t c = s[s.size() - 3], h = s[s.size() - 2], w = s[s.size() - 1];
  if (c != 3) throw ShapeError("generator expects 3 input channels, got " + std::to_string(c));
  if (h == 0 || w == 0 || h % 16 != 0 || w % 16 != 0) {
    throw ShapeError("generator input extents must be positive multiples of 16, got " + std::to_string(h) + "x" +
                     std::to_string(w));
  }
  auto record = [&](const ag::Tensor& t) {
    if (trace) trace->push_back(t);
    return t;
  };
  const float a = kLeakySlope;

  const ag::Tensor x1 = record(conv_act(input, conv1_, a));
  std::vector<ag::Tensor> enc{record(conv_act(x1, conv2_, a))};  // x_2 .. x_6
  for (int i = 0; i < 4; ++i) {
    ag::Tensor t = conv_act(enc.back(), down_[i].first, a);
    t = conv_act(t, down_[i].second, a);
    enc.push_back(record(ag::max_pool2(t)));
  }
  ag::Tensor t = record(conv_act(enc.back(), conv3_, a));  // x_7
  t = record(conv_act(t, conv4_, a));                      // x_8
  for (int i = 0; i < 4; ++i) {
    t = record(conv_act(ag::upsample2(t), up_[i], a));  // x_9, x_11, x_13, x_15
    t = conv_act(ag::concat_channels(t, enc[3 - i]), fusion_[i].first, a);
    t = record(conv_act(t, fusion_[i].second, a));  // x_10, x_12, x_14, x_16
  }
  return ag::sigmoid(ag::conv2d(t, conv5_));
}

std::vector<LayerRow> GeneratorModel::layer_table(std::size_t height, std::size_t width) const {
  if (height % 16 != 0 || width % 16 != 0 || height == 0 || width == 0) {
    throw ShapeError("layer table needs extents divisible by 16");
  }
  std::vector<LayerRow> rows;
  auto conv_out = [](std::size_t extent, const ag::ConvParams& p) {
    return ag::conv_output_extent(extent, p.kernel_size(), p.stride, p.padding);
  };
  std::size_t h = height, w = width;
  auto add = [&](std::string name, std::string io, std::size_t in_c, std::size_t out_c) {
    rows.push_back({std::move(name), std::move(io), h, w, in_c, out_c});
  };

  h = conv_out(h, conv1_), w = conv_out(w, conv1_);
  add("conv1", "Y'/" + x_name(1), conv1_.in_channels(), conv1_.out_channels());
  h = conv_out(h, conv2_), w = conv_out(w, conv2_);
  add("conv2", x_name(1) + "/" + x_name(2), conv2_.in_channels(), conv2_.out_channels());
  std::vector<std::size_t> skip_channels{conv2_.out_channels()};
  for (int i = 0; i < 4; ++i) {
    h = conv_out(conv_out(h, down_[i].first), down_[i].second) / 2;
    w = conv_out(conv_out(w, down_[i].first), down_[i].second) / 2;
    add("down" + std::to_string(i + 1), x_name(i + 2) + "/" + x_name(i + 3), down_[i].first.in_channels(),
        down_[i].second.out_channels());
    skip_channels.push_back(down_[i].second.out_channels());
  }
  h = conv_out(h, conv3_), w = conv_out(w, conv3_);
  add("conv3", x_name(6) + "/" + x_name(7), conv3_.in_channels(), conv3_.out_channels());
  h = conv_out(h, conv4_), w = conv_out(w, conv4_);
  add("conv4", x_name(7) + "/" + x_name(8), conv4_.in_channels(), conv4_.out_channels());
  for (int i = 0; i < 4; ++i) {
    const int x_in = 8 + 2 * i;
    h = conv_out(h * 2, up_[i]), w = conv_out(w * 2, up_[i]);
    add("up" + std::to_string(i + 1), x_name(x_in) + "/" + x_name(x_in + 1), up_[i].in_channels(),
        up_[i].out_channels());
    if (fusion_[i].first.in_channels() != up_[i].out_channels() + skip_channels[3 - i]) {
      throw ShapeError("fusion" + std::to_string(i + 1) + " input channels disagree with its concat inputs");
    }
    h = conv_out(conv_out(h, fusion_[i].first), fusion_[i].second);
    w = conv_out(conv_out(w, fusion_[i].first), fusion_[i].second);
    add("fusion" + std::to_string(i + 1), x_name(x_in + 1) + ", " + x_name(5 - i) + "/" + x_name(x_in + 2),
        fusion_[i].first.in_channels(), fusion_[i].second.out_channels());
  }
  h = conv_out(h, conv5_), w = conv_out(w, conv5_);
  add("conv5", x_name(16) + "/Y", conv5_.in_channels(), conv5_.out_channels());
  return rows;
}

std::vector<NamedParam> GeneratorModel::parameters() const {
  std::vector<NamedParam> out;
  push_conv(out, "gen.conv1", conv1_);
  push_conv(out, "gen.conv2", conv2_);
  for (int i = 0; i < 4; ++i) {
    const std::string base = "gen.down" + std::to_string(i + 1);
    push_conv(out, base + ".0", down_[i].first);
    push_conv(out, base + ".1", down_[i].second);
  }
  push_conv(out, "gen.conv3", conv3_);
  push_conv(out, "gen.conv4", conv4_);
  for (int i = 0; i < 4; ++i) {
    push_conv(out, "gen.up" + std::to_string(i + 1), up_[i]);
    const std::string base = "gen.fusion" + std::to_string(i + 1);
    push_conv(out, base + ".0", fusion_[i].first);
    push_conv(out, base + ".1", fusion_[i].second);
  }
  push_conv(out, "gen.conv5", conv5_);
  return out;
}

DiscriminatorModel::DiscriminatorModel(double width_scale, std::uint64_t seed, std::vector<std::size_t> widths) {
  if (!(width_scale > 0.0)) throw ArgumentError("width_scale must be positive");
  if (widths.empty() || widths.back() != 1) throw ArgumentError("discriminator must end in a one-channel map");
  std::mt19937_64 rng(seed);
  std::size_t in = 3;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const bool last = i + 1 == widths.size();
    const std::size_t out = last ? 1 : scaled_channels(widths[i], width_scale);
    layers_.push_back(conv3x3(in, out, rng, 2));
    in = out;
  }
}

std::size_t DiscriminatorModel::min_input_extent() const { return std::size_t{1} << layers_.size(); }

ag::Tensor DiscriminatorModel::forward(const ag::Tensor& img) const {
  const auto& s = img.shape();
  if (s.size() != 3 && s.size() != 4) {
    throw ShapeError("discriminator expects 3xHxW or Nx3xHxW input, got " + ag::shape_to_string(s));
  }
  const std::size_t h = s[s.size() - 2], w = s[s.size() - 1];
  if (h < min_input_extent() || w < min_input_extent()) {
    throw ShapeError("discriminator input " + std::to_string(h) + "x" + std::to_string(w) +
                     " is smaller than its receptive extent " + std::to_string(min_input_extent()));
  }
  ag::Tensor t = img;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    t = ag::conv2d(t, layers_[i]);
    if (i + 1 < layers_.size()) t = ag::leaky_relu(t, kLeakySlope);
  }
  return t;
}

ag::Tensor DiscriminatorModel::score(const ag::Tensor& img) const { return ag::mean(forward(img)); }

std::vector<NamedParam> DiscriminatorModel::parameters() const {
  std::vector<NamedParam> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) push_conv(out, "disc.layer" + std::to_string(i), layers_[i]);
  return out;
}

}  // namespace lle
