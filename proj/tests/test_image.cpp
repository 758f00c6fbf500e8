#include <gtest/gtest.h>

#include <cmath>

#include "patternforge/errors.hpp"
#include "patternforge/image.hpp"
#include "patternforge/image_ops.hpp"
#include "test_support.hpp"

namespace pf = patternforge;

TEST(Image, RejectsDegenerateSizes) {
  EXPECT_THROW(pf::Image(0, 5), pf::PatternError);
  EXPECT_THROW(pf::Image(5, 0), pf::PatternError);
  EXPECT_THROW(pf::Image(2, 2, std::vector<std::uint8_t>(11)), pf::Error);
}

TEST(Image, SampleCountInvariant) {
  const pf::Image img(7, 3, pf::Rgb{1, 2, 3});
  EXPECT_TRUE(img.valid());
  EXPECT_EQ(img.samples().size(), 7u * 3u * 3u);
  EXPECT_EQ(img.get(6, 2), (pf::Rgb{1, 2, 3}));
}

TEST(Png, LosslessRoundTrip) {
  const auto img = pftest::noise_image(37, 19, 3);
  const auto bytes = pf::encode_png(img);
  EXPECT_EQ(pf::decode_png(bytes), img);
  EXPECT_EQ(pf::encode_png(pf::decode_png(bytes)), bytes);
}

TEST(Png, CorruptBytesThrow) {
  std::vector<std::uint8_t> junk(64, 0x42);
  EXPECT_THROW(pf::decode_png(junk), pf::ImageIoError);
}

TEST(Jpeg, DecodesCloseToInput) {
  const auto img = pftest::test_image(48, 40);
  const auto decoded = pf::decode_jpeg(pf::encode_jpeg(img, {95.0, false}));
  ASSERT_EQ(decoded.width(), 48);
  ASSERT_EQ(decoded.height(), 40);
  double err = 0.0;
  for (std::size_t i = 0; i < img.samples().size(); ++i) err += std::abs(img.samples()[i] - decoded.samples()[i]);
  EXPECT_LT(err / static_cast<double>(img.samples().size()), 6.0);
}

TEST(Jpeg, LowerQualityLosesMore) {
  const auto img = pftest::test_image(64, 64);
  auto mae = [&](double q) {
    const auto d = pf::decode_jpeg(pf::encode_jpeg(img, {q, true}));
    double e = 0.0;
    for (std::size_t i = 0; i < img.samples().size(); ++i) e += std::abs(img.samples()[i] - d.samples()[i]);
    return e;
  };
  EXPECT_GT(mae(10.0), mae(90.0));
}

TEST(ReadImage, DetectsFormatByContent) {
  pftest::TempDir dir("readimg");
  const auto img = pftest::test_image(20, 10);
  pf::write_png(img, dir / "a.png");
  EXPECT_EQ(pf::read_image(dir / "a.png"), img);
  const auto jpeg = pf::encode_jpeg(img, {90.0, false});
  std::ofstream(dir / "b.bin", std::ios::binary).write(reinterpret_cast<const char*>(jpeg.data()),
                                                         static_cast<std::streamsize>(jpeg.size()));
  EXPECT_EQ(pf::read_image(dir / "b.bin").width(), 20);
  EXPECT_THROW(pf::read_image(dir / "missing.png"), pf::ImageIoError);
}

TEST(ImageOps, ClampRoundsHalfAwayFromZero) {
  EXPECT_EQ(pf::clamp_u8(157.5), 158);
  EXPECT_EQ(pf::clamp_u8(157.49), 157);
  EXPECT_EQ(pf::clamp_u8(-3.0), 0);
  EXPECT_EQ(pf::clamp_u8(300.0), 255);
  EXPECT_EQ(pf::clamp_u8(std::nan("")), 0);
}

TEST(ImageOps, ResizeToSameSizeIsIdentity) {
  const auto img = pftest::noise_image(13, 9, 1);
  EXPECT_EQ(pf::resize_bilinear(img, 13, 9), img);
}

TEST(ImageOps, ResizeOfConstantIsConstant) {
  const pf::Image img(10, 10, pf::Rgb{9, 99, 199});
  EXPECT_EQ(pf::resize_bilinear(img, 23, 4), pf::Image(23, 4, pf::Rgb{9, 99, 199}));
}

TEST(ImageOps, SampleOrFillBoundary) {
  const pf::Image img(4, 4, pf::Rgb{200, 100, 50});
  double v[3];
  pf::sample_or_fill(img, -0.4, 1.0, {0, 0, 0}, v);
  EXPECT_DOUBLE_EQ(v[0], 200.0);
  pf::sample_or_fill(img, -0.6, 1.0, {0, 0, 0}, v);
  EXPECT_DOUBLE_EQ(v[0], 0.0);
  pf::sample_or_fill(img, 1.0, 3.6, {1, 2, 3}, v);
  EXPECT_DOUBLE_EQ(v[2], 3.0);
}

TEST(ImageOps, BilinearMidpoint) {
  pf::Image img(2, 1);
  img.set(0, 0, {0, 0, 0});
  img.set(1, 0, {100, 50, 10});
  double v[3];
  pf::sample_clamped(img, 0.5, 0.0, v);
  EXPECT_DOUBLE_EQ(v[0], 50.0);
  EXPECT_DOUBLE_EQ(v[1], 25.0);
  EXPECT_DOUBLE_EQ(v[2], 5.0);
}

TEST(ImageOps, CropCopiesRectangle) {
  const auto img = pftest::noise_image(10, 8, 2);
  const auto c = pf::crop(img, 3, 2, 4, 5);
  ASSERT_EQ(c.width(), 4);
  ASSERT_EQ(c.height(), 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 4; ++x) EXPECT_EQ(c.get(x, y), img.get(x + 3, y + 2));
}

TEST(ImageOps, GaussianBlurPreservesConstant) {
  const pf::Image img(9, 7, pf::Rgb{10, 20, 30});
  const auto out = pf::gaussian_blur(img, 2.0, 0.7);
  for (std::size_t i = 0; i < out.size(); i += 3) {
    EXPECT_NEAR(out[i], 10.0, 1e-9);
    EXPECT_NEAR(out[i + 2], 30.0, 1e-9);
  }
}
