#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "patternforge/errors.hpp"
#include "patternforge/patterns.hpp"
#include "patternforge/rng.hpp"
#include "test_support.hpp"

namespace pf = patternforge;

namespace {

const std::set<std::string> kBase = {
    "ResizeCrop", "Blend",      "GrayScale", "ColorJitter", "Blur",       "Pixelate",   "Rotate",
    "Padding",    "AddNoise",   "VertFlip",  "HoriFlip",    "PerspChange", "StackImage", "ChangeChan",
    "EncQuality", "AddStripes", "Sharpen",   "Skew",        "ShufPixels", "AddShapes",  "Repeat",
    "CutAssemble", "CutPaste",  "Solarize",  "Posterize",   "Gamma",      "Erasing",    "GridDistort"};
const std::set<std::string> kNovel = {"Mosaic", "Voronoi", "Pyramid", "Swirl", "WaveBlock", "OilPaint"};

pf::PatternInstance fixed(const std::string& id, pf::ParamMap params = {}, std::uint64_t seed = 0) {
  return {id, std::move(params), seed};
}

}  // namespace

TEST(Catalog, ThirtyFourPatternsSplitTwentyEightSix) {
  const auto cat = pf::catalog();
  ASSERT_EQ(cat.size(), 34u);
  std::set<std::string> base, novel, all;
  for (const auto& d : cat) {
    all.insert(d.id);
    (d.split == pf::Split::base ? base : novel).insert(d.id);
  }
  EXPECT_EQ(all.size(), 34u);
  EXPECT_EQ(base, kBase);
  EXPECT_EQ(novel, kNovel);
  for (const auto& id : novel) EXPECT_FALSE(base.contains(id));
}

TEST(Catalog, StableOrderBaseFirst) {
  const auto a = pf::catalog();
  const auto b = pf::catalog();
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].split, i < 28 ? pf::Split::base : pf::Split::novel);
  }
  EXPECT_EQ(pf::pattern_ids(pf::Split::novel).size(), 6u);
}

TEST(Catalog, UnknownIdThrows) {
  EXPECT_THROW(pf::find_pattern("Nope"), pf::CatalogError);
  EXPECT_THROW(pf::sample_instance("Nope", 1), pf::CatalogError);
  EXPECT_THROW(pf::apply(pftest::test_image(), fixed("Nope")), pf::CatalogError);
}

TEST(Catalog, JsonDumpHasSchemas) {
  const auto j = pf::catalog_json();
  ASSERT_EQ(j.size(), 34u);
  for (const auto& d : j) {
    EXPECT_TRUE(d.contains("id"));
    EXPECT_TRUE(d.contains("category"));
    EXPECT_TRUE(d.contains("split"));
    EXPECT_TRUE(d.at("param_schema").is_array());
  }
}

TEST(SampleInstance, SameSeedSameParams) {
  EXPECT_EQ(pf::sample_instance("Rotate", 7), pf::sample_instance("Rotate", 7));
  EXPECT_NE(pf::sample_instance("Rotate", 7), pf::sample_instance("Rotate", 8));
}

TEST(SampleInstance, RotateAngleSweepStaysInRange) {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const double a = pf::sample_instance("Rotate", s).param("angle");
    ASSERT_GE(a, -45.0);
    ASSERT_LE(a, 45.0);
  }
}

TEST(SampleInstance, ParameterlessPatternsHaveNoParams) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    EXPECT_TRUE(pf::sample_instance("HoriFlip", s).params.empty());
    EXPECT_TRUE(pf::sample_instance("VertFlip", s).params.empty());
    EXPECT_TRUE(pf::sample_instance("GrayScale", s).params.empty());
  }
}

TEST(SampleInstance, EveryDrawValidatesAgainstItsSchema) {
  for (const auto& d : pf::catalog()) {
    for (std::uint64_t s = 0; s < 300; ++s) {
      const auto inst = pf::sample_instance(d.id, s);
      ASSERT_NO_THROW(pf::validate(inst)) << d.id;
      for (const auto& spec : d.params) {
        const double v = inst.param(spec.name);
        ASSERT_GE(v, spec.lo) << d.id << "." << spec.name;
        ASSERT_LE(v, spec.hi) << d.id << "." << spec.name;
        if (spec.kind == pf::ParamSpec::Kind::integer) ASSERT_EQ(v, std::floor(v));
      }
    }
  }
}

TEST(Validate, RejectsOutOfRangeMissingAndExtraParams) {
  auto inst = pf::sample_instance("Rotate", 1);
  inst.params["angle"] = 60.0;
  EXPECT_THROW(pf::validate(inst), pf::PatternError);
  inst.params.clear();
  EXPECT_THROW(pf::validate(inst), pf::PatternError);
  auto flip = fixed("HoriFlip", {{"angle", 1.0}});
  EXPECT_THROW(pf::validate(flip), pf::PatternError);
  auto px = pf::sample_instance("Pixelate", 2);
  px.params["block"] = 4.5;
  EXPECT_THROW(pf::validate(px), pf::PatternError);
}

TEST(Apply, HoriFlipTwoPixels) {
  pf::Image img(2, 1);
  img.set(0, 0, {1, 2, 3});
  img.set(1, 0, {4, 5, 6});
  const auto out = pf::apply(img, fixed("HoriFlip"));
  EXPECT_EQ(out.get(0, 0), (pf::Rgb{4, 5, 6}));
  EXPECT_EQ(out.get(1, 0), (pf::Rgb{1, 2, 3}));
}

TEST(Apply, GrayScaleSinglePixel) {
  const pf::Image img(1, 1, pf::Rgb{120, 200, 40});
  const auto expected = static_cast<std::uint8_t>(std::lround(0.299 * 120 + 0.587 * 200 + 0.114 * 40));
  ASSERT_EQ(expected, 158);
  EXPECT_EQ(pf::apply(img, fixed("GrayScale")).get(0, 0), (pf::Rgb{expected, expected, expected}));
}

TEST(Apply, GrayScaleMatchesPerPixelOracle) {
  const auto img = pftest::noise_image(17, 11, 5);
  const auto out = pf::apply(img, fixed("GrayScale"));
  for (int y = 0; y < 11; ++y) {
    for (int x = 0; x < 17; ++x) {
      const auto c = img.get(x, y);
      const double l = 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
      const auto v = static_cast<std::uint8_t>(std::floor(l + 0.5));
      ASSERT_EQ(out.get(x, y), (pf::Rgb{v, v, v}));
    }
  }
}

TEST(Apply, FlipsAreInvolutions) {
  const auto img = pftest::noise_image(31, 17, 9);
  EXPECT_EQ(pf::apply(pf::apply(img, fixed("HoriFlip")), fixed("HoriFlip")), img);
  EXPECT_EQ(pf::apply(pf::apply(img, fixed("VertFlip")), fixed("VertFlip")), img);
  EXPECT_NE(pf::apply(img, fixed("VertFlip")), img);
}

TEST(Apply, VertFlipMovesRows) {
  const auto img = pftest::noise_image(5, 4, 2);
  const auto out = pf::apply(img, fixed("VertFlip"));
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) EXPECT_EQ(out.get(x, y), img.get(x, 3 - y));
}

TEST(Apply, DeterministicForEveryPattern) {
  const auto img = pftest::test_image();
  for (const auto& d : pf::catalog()) {
    const auto inst = pf::sample_instance(d.id, 1234);
    EXPECT_EQ(pf::apply(img, inst), pf::apply(img, inst)) << d.id;
  }
}

TEST(ApplyCombo, EmptyComboThrows) {
  EXPECT_THROW(pf::apply_combo(pftest::test_image(), {}), pf::PatternError);
}

TEST(ApplyCombo, SingleInstanceEqualsApply) {
  const auto img = pftest::test_image();
  for (const auto& d : pf::catalog()) {
    const auto inst = pf::sample_instance(d.id, 77);
    EXPECT_EQ(pf::apply_combo(img, {{inst}}), pf::apply(img, inst)) << d.id;
  }
}

TEST(ApplyCombo, IsALeftFold) {
  const auto img = pftest::test_image();
  const auto g = fixed("GrayScale");
  EXPECT_EQ(pf::apply_combo(img, {{g, g}}), pf::apply(pf::apply(img, g), g));
  const auto a = pf::sample_instance("Swirl", 3);
  const auto b = pf::sample_instance("Mosaic", 4);
  const auto c = pf::sample_instance("Blur", 5);
  EXPECT_EQ(pf::apply_combo(img, {{a, b, c}}), pf::apply(pf::apply(pf::apply(img, a), b), c));
}

TEST(ApplyCombo, OrderMattersForRotateAndFlip) {
  const auto img = pftest::test_image();
  const auto rot = fixed("Rotate", {{"angle", 30.0}});
  const auto flip = fixed("HoriFlip");
  EXPECT_NE(pf::apply_combo(img, {{rot, flip}}), pf::apply_combo(img, {{flip, rot}}));
}

TEST(Apply, RotateByZeroIsIdentity) {
  const auto img = pftest::noise_image(20, 14, 4);
  EXPECT_EQ(pf::apply(img, fixed("Rotate", {{"angle", 0.0}})), img);
}

TEST(Apply, RotateQuarterTurnOnSquare) {
  // 45 degrees keeps the centre pixel of an odd square fixed.
  pf::Image img(9, 9, pf::Rgb{10, 10, 10});
  img.set(4, 4, {200, 100, 0});
  const auto out = pf::apply(img, fixed("Rotate", {{"angle", 45.0}}));
  EXPECT_EQ(out.get(4, 4), (pf::Rgb{200, 100, 0}));
}

TEST(Apply, SolarizeInvertsAtOrAboveThreshold) {
  pf::Image img(3, 1);
  img.set(0, 0, {99, 100, 101});
  img.set(1, 0, {0, 255, 128});
  img.set(2, 0, {100, 0, 255});
  const auto out = pf::apply(img, fixed("Solarize", {{"threshold_r", 100}, {"threshold_g", 100}, {"threshold_b", 100}}));
  EXPECT_EQ(out.get(0, 0), (pf::Rgb{99, 155, 154}));
  EXPECT_EQ(out.get(1, 0), (pf::Rgb{0, 0, 127}));
  EXPECT_EQ(out.get(2, 0), (pf::Rgb{155, 0, 0}));
}

TEST(Apply, PaddingGrowsCanvas) {
  const auto img = pftest::test_image(40, 30);
  const auto out = pf::apply(img, fixed("Padding", {{"left", 0.25}, {"top", 0.0}, {"right", 0.0}, {"bottom", 0.1},
                                                  {"r", 1}, {"g", 2}, {"b", 3}}));
  EXPECT_EQ(out.width(), 50);
  EXPECT_EQ(out.height(), 33);
  EXPECT_EQ(out.get(0, 0), (pf::Rgb{1, 2, 3}));
  EXPECT_EQ(out.get(10, 0), img.get(0, 0));
}

TEST(Apply, PartnerFallbackIsDeterministic) {
  const auto img = pftest::test_image();
  const auto blend = pf::sample_instance("Blend", 3);
  EXPECT_EQ(pf::apply(img, blend), pf::apply(img, blend));
  EXPECT_NE(pf::apply(img, blend), img);
}

namespace {

class FixedPartners final : public pf::PartnerSource {
 public:
  std::size_t size() const override { return 3; }
  pf::Image fetch(std::size_t index) const override { return pftest::noise_image(30, 20, index); }
};

}  // namespace

TEST(Apply, PartnerSourceIsUsed) {
  const auto img = pftest::test_image();
  FixedPartners partners;
  const auto stack = pf::sample_instance("StackImage", 8);
  EXPECT_NE(pf::apply(img, stack, &partners), pf::apply(img, stack));
}

// >= 99% of 1,000 seeds give pairwise-distinct outputs on a fixed 64x64 image.
class SeedSensitivity : public ::testing::TestWithParam<std::string> {};

TEST_P(SeedSensitivity, ThousandSeedsMostlyDistinct) {
  const auto img = pftest::test_image(64, 64);
  std::set<std::vector<std::uint8_t>> outputs;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto out = pf::apply(img, pf::sample_instance(GetParam(), pf::derive_seed(2024, GetParam(), s)));
    std::vector<std::uint8_t> key(out.samples().begin(), out.samples().end());
    key.push_back(static_cast<std::uint8_t>(out.width() & 0xff));
    key.push_back(static_cast<std::uint8_t>(out.height() & 0xff));
    outputs.insert(std::move(key));
  }
  EXPECT_GE(outputs.size(), 990u) << GetParam();
}

std::vector<std::string> parameterized_ids() {
  std::vector<std::string> ids;
  for (const auto& d : pf::catalog()) {
    if (d.parameterized()) ids.push_back(d.id);
  }
  return ids;
}

INSTANTIATE_TEST_SUITE_P(Catalog, SeedSensitivity, ::testing::ValuesIn(parameterized_ids()),
                         [](const auto& info) { return info.param; });

TEST(Closure, TenThousandRandomTriplesYieldValidImages) {
  pf::SplitMix64 rng(99);
  const auto cat = pf::catalog();
  for (int i = 0; i < 10'000; ++i) {
    const auto& d = cat[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(cat.size()) - 1))];
    const int w = static_cast<int>(rng.uniform_int(1, 72));
    const int h = static_cast<int>(rng.uniform_int(1, 72));
    const auto img = pftest::noise_image(w, h, rng.next());
    const auto inst = pf::sample_instance(d.id, rng.next());
    pf::Image out;
    ASSERT_NO_THROW(out = pf::apply(img, inst)) << d.id << " on " << w << "x" << h;
    ASSERT_TRUE(out.valid()) << d.id;
    ASSERT_GE(out.width(), 1);
    ASSERT_GE(out.height(), 1);
    ASSERT_EQ(out.samples().size(), out.pixel_count() * 3);
  }
}

TEST(ComboKey, SortedAndOrderInsensitive) {
  pf::PatternCombo a{{fixed("Swirl"), fixed("Mosaic")}};
  pf::PatternCombo b{{fixed("Mosaic"), fixed("Swirl")}};
  EXPECT_EQ(pf::combo_key(a), "Mosaic+Swirl");
  EXPECT_EQ(pf::combo_key(a), pf::combo_key(b));
  EXPECT_EQ(pf::parse_combo_key("Mosaic+Swirl"), (pf::PatternSet{"Mosaic", "Swirl"}));
  EXPECT_EQ(pf::combo_key(pf::parse_combo_key("Swirl+Mosaic")), "Mosaic+Swirl");
}

TEST(InstanceJson, RoundTrip) {
  for (const auto& d : pf::catalog()) {
    const auto inst = pf::sample_instance(d.id, 0xdeadbeefcafef00dULL);
    EXPECT_EQ(pf::instance_from_json(pf::to_json(inst)), inst) << d.id;
  }
  const pf::PatternCombo combo{{pf::sample_instance("Swirl", 1), pf::sample_instance("Voronoi", 2)}};
  EXPECT_EQ(pf::combo_from_json(pf::to_json(combo)), combo);
  EXPECT_EQ(pf::combo_from_json(nlohmann::json::parse(pf::to_json(combo).dump())), combo);
}

TEST(InstanceJson, MalformedThrows) {
  EXPECT_THROW(pf::instance_from_json(nlohmann::json::parse(R"({"pattern": 3})")), pf::InputError);
  EXPECT_THROW(pf::combo_from_json(nlohmann::json::parse(R"({"a": 1})")), pf::InputError);
}
