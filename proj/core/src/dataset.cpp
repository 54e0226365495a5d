#include "lle/dataset.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

#include "lle/error.hpp"

namespace lle {

namespace {

std::vector<std::size_t> eligible(const std::vector<RgbImage>& pool, std::size_t patch) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].width() >= patch && pool[i].height() >= patch) out.push_back(i);
  }
  return out;
}

std::vector<RgbImage> load_all(const std::filesystem::path& dir) {
  std::vector<RgbImage> out;
  for (const auto& p : list_images(dir)) out.push_back(load_image(p));
  return out;
}

void draw(const std::vector<RgbImage>& pool, const std::vector<std::size_t>& candidates, std::size_t patch,
          std::size_t count, std::mt19937_64& rng, std::vector<RgbImage>& out, std::vector<std::size_t>& sources) {
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t idx = candidates[pick(rng)];
    const RgbImage& img = pool[idx];
    std::uniform_int_distribution<std::size_t> ox(0, img.width() - patch);
    std::uniform_int_distribution<std::size_t> oy(0, img.height() - patch);
    const std::size_t x = ox(rng);
    const std::size_t y = oy(rng);
    out.push_back(crop_patch(img, x, y, patch));
    sources.push_back(idx);
  }
}

}  // namespace

UnpairedDataset::UnpairedDataset(std::vector<RgbImage> low, std::vector<RgbImage> normal)
    : low_(std::move(low)), normal_(std::move(normal)) {
  if (low_.empty()) throw DatasetError("low-light pool is empty");
  if (normal_.empty()) throw DatasetError("normal-light pool is empty");
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DatasetError("not a directory: '" + dir.string() + "'");
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_supported_image(entry.path())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

UnpairedDataset UnpairedDataset::from_directories(const std::filesystem::path& low_dir,
                                                  const std::filesystem::path& normal_dir) {
  auto low = load_all(low_dir);
  auto normal = load_all(normal_dir);
  if (low.empty()) throw DatasetError("no images in low-light directory '" + low_dir.string() + "'");
  if (normal.empty()) throw DatasetError("no images in normal-light directory '" + normal_dir.string() + "'");
  return UnpairedDataset(std::move(low), std::move(normal));
}

std::vector<std::size_t> UnpairedDataset::eligible_low(std::size_t patch) const { return eligible(low_, patch); }
std::vector<std::size_t> UnpairedDataset::eligible_normal(std::size_t patch) const {
  return eligible(normal_, patch);
}

void UnpairedDataset::check_patch_size(std::size_t patch) const {
  auto check = [patch](const std::vector<RgbImage>& pool, const char* name) {
    std::size_t usable = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].width() >= patch && pool[i].height() >= patch) {
        ++usable;
      } else {
        spdlog::warn("{} image #{} ({}x{}) is smaller than the {}px patch; skipped", name, i, pool[i].width(),
                     pool[i].height(), patch);
      }
    }
    if (usable == 0) throw DatasetError(std::string("no ") + name + " image is at least " + std::to_string(patch) + "px");
  };
  check(low_, "low-light");
  check(normal_, "normal-light");
}

PatchBatch sample_batch(const UnpairedDataset& ds, std::size_t patch_size, std::size_t batch_size,
                        std::mt19937_64& rng) {
  if (patch_size == 0 || batch_size == 0) throw ArgumentError("patch and batch size must be positive");
  const auto low = ds.eligible_low(patch_size);
  const auto normal = ds.eligible_normal(patch_size);
  if (low.empty()) throw DatasetError("low-light pool has no image of at least " + std::to_string(patch_size) + "px");
  if (normal.empty()) {
    throw DatasetError("normal-light pool has no image of at least " + std::to_string(patch_size) + "px");
  }
  PatchBatch batch;
  draw(ds.low(), low, patch_size, batch_size, rng, batch.low, batch.low_sources);
  draw(ds.normal(), normal, patch_size, batch_size, rng, batch.normal, batch.normal_sources);
  return batch;
}

ag::Tensor to_tensor(const std::vector<RgbImage>& images) {
  if (images.empty()) throw ArgumentError("cannot stack an empty image list");
  const std::size_t w = images.front().width(), h = images.front().height();
  std::vector<float> data;
  data.reserve(images.size() * 3 * w * h);
  for (const auto& img : images) {
    if (img.width() != w || img.height() != h) throw ShapeError("batch images differ in size");
    for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
      auto d = img.channel(c).data();
      data.insert(data.end(), d.begin(), d.end());
    }
  }
  return ag::Tensor::from_data({images.size(), 3, h, w}, std::move(data));
}

ag::Tensor to_tensor(const RgbImage& image) {
  std::vector<float> data;
  data.reserve(3 * image.pixel_count());
  for (std::size_t c = 0; c < RgbImage::kChannels; ++c) {
    auto d = image.channel(c).data();
    data.insert(data.end(), d.begin(), d.end());
  }
  return ag::Tensor::from_data({3, image.height(), image.width()}, std::move(data));
}

RgbImage to_image(const ag::Tensor& t, std::size_t index) {
  const auto& s = t.shape();
  std::size_t offset = 0;
  if (s.size() == 4) {
    if (index >= s[0]) throw ArgumentError("batch index out of range");
    offset = index * s[1] * s[2] * s[3];
  } else if (s.size() != 3) {
    throw ShapeError("to_image expects a 3xHxW or Nx3xHxW tensor");
  }
  const std::size_t c = s[s.size() - 3], h = s[s.size() - 2], w = s[s.size() - 1];
  if (c != 3) throw ShapeError("to_image expects 3 channels");
  RgbImage img(w, h);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    auto src = t.data().subspan(offset + ch * h * w, h * w);
    auto dst = img.channel(ch).data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 0.0f ? std::min(src[i], 1.0f) : 0.0f;
  }
  return img;
}

}  // namespace lle
