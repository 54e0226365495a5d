#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lle/dataset.hpp"
#include "lle/error.hpp"

using namespace lle;

namespace {

RgbImage tagged(std::size_t w, std::size_t h, float value) { return RgbImage(w, h, value); }

}  // namespace

TEST(Dataset, ExactSizeImageIsWholePatch) {
  std::mt19937_64 rng(1);
  RgbImage img = lle::testing::random_image(32, 32, rng);
  const UnpairedDataset ds({img}, {img});
  for (int i = 0; i < 5; ++i) {
    const PatchBatch b = sample_batch(ds, 32, 3, rng);
    ASSERT_EQ(b.low.size(), 3u);
    for (const auto& p : b.low) EXPECT_EQ(p, img);
  }
}

TEST(Dataset, DrawFrequencyIsUniform) {
  const UnpairedDataset ds({tagged(40, 40, 0.1f), tagged(48, 32, 0.9f)}, {tagged(32, 32, 0.5f)});
  std::mt19937_64 rng(2);
  const PatchBatch b = sample_batch(ds, 32, 1000, rng);
  std::size_t first = 0;
  for (std::size_t s : b.low_sources) first += s == 0;
  EXPECT_GE(first, 400u);
  EXPECT_LE(first, 600u);
  // crop origins cover the valid range
  for (std::size_t i = 0; i < b.low.size(); ++i) EXPECT_EQ(b.low[i].at(0, 0, 0), b.low_sources[i] == 0 ? 0.1f : 0.9f);
}

TEST(Dataset, Deterministic) {
  std::mt19937_64 img_rng(3);
  const UnpairedDataset ds({lle::testing::random_image(50, 40, img_rng), lle::testing::random_image(64, 64, img_rng)},
                           {lle::testing::random_image(70, 33, img_rng)});
  std::mt19937_64 a(9), b(9);
  const PatchBatch x = sample_batch(ds, 32, 8, a), y = sample_batch(ds, 32, 8, b);
  EXPECT_EQ(x.low, y.low);
  EXPECT_EQ(x.normal, y.normal);
}

TEST(Dataset, SmallImagesSkipped) {
  const UnpairedDataset ds({tagged(16, 16, 0.2f), tagged(32, 32, 0.7f)}, {tagged(32, 32, 0.5f)});
  EXPECT_EQ(ds.eligible_low(32), std::vector<std::size_t>{1});
  EXPECT_NO_THROW(ds.check_patch_size(32));
  std::mt19937_64 rng(4);
  for (const auto& p : sample_batch(ds, 32, 10, rng).low) EXPECT_EQ(p.at(0, 0, 0), 0.7f);
  EXPECT_THROW(ds.check_patch_size(48), DatasetError);
  EXPECT_THROW(sample_batch(ds, 48, 1, rng), DatasetError);
}

TEST(Dataset, EmptyPoolRejected) {
  EXPECT_THROW(UnpairedDataset({tagged(32, 32, 0)}, {}), DatasetError);
  EXPECT_THROW(UnpairedDataset({}, {tagged(32, 32, 0)}), DatasetError);
}

TEST(Dataset, FromDirectories) {
  lle::testing::TempDir dir;
  std::filesystem::create_directories(dir / "low");
  std::filesystem::create_directories(dir / "normal");
  save_image(tagged(32, 32, 0.2f), dir / "low/b.png");
  save_image(tagged(32, 32, 0.4f), dir / "low/a.png");
  save_image(tagged(32, 32, 0.6f), dir / "normal/x.png");
  lle::testing::write_bytes(dir / "low/notes.txt", {'x'});
  const auto ds = UnpairedDataset::from_directories(dir / "low", dir / "normal");
  ASSERT_EQ(ds.low().size(), 2u);
  EXPECT_NEAR(ds.low()[0].at(0, 0, 0), 0.4f, 1.0 / 255);
  EXPECT_THROW(UnpairedDataset::from_directories(dir / "low", dir / "missing"), Error);
}

TEST(Dataset, TensorConversionRoundTrip) {
  std::mt19937_64 rng(5);
  const RgbImage a = lle::testing::random_image(8, 4, rng), b = lle::testing::random_image(8, 4, rng);
  const ag::Tensor t = to_tensor(std::vector<RgbImage>{a, b});
  EXPECT_EQ(t.shape(), (ag::Shape{2, 3, 4, 8}));
  EXPECT_EQ(to_image(t, 1), b);
  EXPECT_EQ(to_image(to_tensor(a)), a);
  EXPECT_THROW(to_tensor(std::vector<RgbImage>{a, lle::testing::random_image(4, 4, rng)}), ShapeError);
}
