#include "lle/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "lle/error.hpp"

namespace lle {

namespace {

float clamp01(float v) {
  // NaN maps to 0 so the [0,1] invariant holds unconditionally.
  if (!(v > 0.0f)) return 0.0f;
  return v < 1.0f ? v : 1.0f;
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

RgbImage from_interleaved(const unsigned char* bytes, std::size_t width, std::size_t height,
                          std::size_t stride_channels) {
  RgbImage img(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const unsigned char* px = bytes + (y * width + x) * stride_channels;
      for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
        img.at(c, x, y) = static_cast<float>(px[c]) / 255.0f;
      }
    }
  }
  return img;
}

RgbImage load_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw FormatError("cannot decode PNG '" + path.string() + "': " + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw FormatError("zero-dimension image '" + path.string() + "'");
  }
  std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("cannot decode PNG '" + path.string() + "': " + msg);
  }
  return from_interleaved(buffer.data(), image.width, image.height, 4);
}

// Reads one whitespace/comment-delimited PPM header token.
std::string ppm_token(std::istream& in) {
  std::string token;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  return token;
}

std::size_t parse_extent(const std::string& token, const std::filesystem::path& path) {
  if (token.empty() || !std::all_of(token.begin(), token.end(), ::isdigit)) {
    throw FormatError("malformed PPM header in '" + path.string() + "'");
  }
  return static_cast<std::size_t>(std::stoull(token));
}

RgbImage load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  if (ppm_token(in) != "P6") throw FormatError("not a binary PPM (P6): '" + path.string() + "'");
  const std::size_t width = parse_extent(ppm_token(in), path);
  const std::size_t height = parse_extent(ppm_token(in), path);
  const std::size_t maxval = parse_extent(ppm_token(in), path);
  if (width == 0 || height == 0) throw FormatError("zero-dimension image '" + path.string() + "'");
  if (maxval != 255) throw FormatError("only 8-bit PPM (maxval 255) is supported");
  std::vector<unsigned char> bytes(width * height * 3);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw FormatError("truncated PPM '" + path.string() + "'");
  }
  return from_interleaved(bytes.data(), width, height, 3);
}

std::vector<unsigned char> interleave(const RgbImage& img) {
  std::vector<unsigned char> bytes(img.pixel_count() * 3);
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      unsigned char* px = bytes.data() + (y * img.width() + x) * 3;
      for (std::size_t c = 0; c < RgbImage::kChannels; ++c) px[c] = quantize_sample(img.at(c, x, y));
    }
  }
  return bytes;
}

}  // namespace

ImagePlane::ImagePlane(std::size_t width, std::size_t height, float fill)
    : width_(width), height_(height), data_(width * height, clamp01(fill)) {}

ImagePlane::ImagePlane(std::size_t width, std::size_t height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != width_ * height_) {
    throw ShapeError("plane data length " + std::to_string(data_.size()) + " != " +
                     std::to_string(width_) + "x" + std::to_string(height_));
  }
  clamp();
}

void ImagePlane::clamp() {
  for (float& v : data_) v = clamp01(v);
}

RgbImage::RgbImage(std::size_t width, std::size_t height, float fill)
    : width_(width),
      height_(height),
      channels_{ImagePlane(width, height, fill), ImagePlane(width, height, fill),
                ImagePlane(width, height, fill)} {}

RgbImage::RgbImage(ImagePlane r, ImagePlane g, ImagePlane b)
    : width_(r.width()), height_(r.height()), channels_{std::move(r), std::move(g), std::move(b)} {
  for (const auto& ch : channels_) {
    if (ch.width() != width_ || ch.height() != height_) {
      throw ShapeError("RGB channels must share extents");
    }
  }
}

void RgbImage::clamp() {
  for (auto& ch : channels_) ch.clamp();
}

bool operator==(const RgbImage& a, const RgbImage& b) {
  if (a.width_ != b.width_ || a.height_ != b.height_) return false;
  for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
    auto da = a.channels_[c].data();
    auto db = b.channels_[c].data();
    if (!std::equal(da.begin(), da.end(), db.begin())) return false;
  }
  return true;
}

unsigned char quantize_sample(float v) {
  return static_cast<unsigned char>(std::floor(clamp01(v) * 255.0f + 0.5f));
}

bool is_supported_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  return ext == ".png" || ext == ".ppm";
}

RgbImage load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file '" + path.string() + "'");
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open '" + path.string() + "'");
  std::array<unsigned char, 8> magic{};
  probe.read(reinterpret_cast<char*>(magic.data()), magic.size());
  const auto got = probe.gcount();
  probe.close();
  if (got >= 8 && png_sig_cmp(magic.data(), 0, 8) == 0) return load_png(path);
  if (got >= 2 && magic[0] == 'P' && magic[1] == '6') return load_ppm(path);
  throw FormatError("unsupported image format '" + path.string() + "' (expected PNG or P6 PPM)");
}

void save_image(const RgbImage& img, const std::filesystem::path& path) {
  if (img.empty()) throw ArgumentError("cannot save an empty image");
  std::vector<unsigned char> bytes = interleave(img);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot write PNG '" + path.string() + "': " + msg);
  }
}

void save_ppm(const RgbImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<unsigned char> bytes = interleave(img);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

ImagePlane luminance(const RgbImage& img) {
  std::vector<float> out(img.pixel_count());
  auto r = img.channel(0).data();
  auto g = img.channel(1).data();
  auto b = img.channel(2).data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
  }
  return ImagePlane(img.width(), img.height(), std::move(out));
}

RgbImage crop_patch(const RgbImage& img, std::size_t x, std::size_t y, std::size_t size) {
  if (size == 0 || x + size > img.width() || y + size > img.height()) {
    throw ArgumentError("crop (" + std::to_string(x) + "," + std::to_string(y) + "," +
                        std::to_string(size) + ") exceeds " + std::to_string(img.width()) + "x" +
                        std::to_string(img.height()) + " image");
  }
  RgbImage out(size, size);
  for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
    for (std::size_t row = 0; row < size; ++row) {
      auto src = img.channel(c).data().subspan((y + row) * img.width() + x, size);
      std::copy(src.begin(), src.end(), out.channel(c).data().begin() + row * size);
    }
  }
  return out;
}

RgbImage scaled(const RgbImage& img, float factor) {
  RgbImage out = img;
  for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
    for (float& v : out.channel(c).data()) v = clamp01(v * factor);
  }
  return out;
}

}  // namespace lle
