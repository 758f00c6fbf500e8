#include "synthetic_sources.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "patternforge/image_ops.hpp"
#include "patternforge/rng.hpp"

namespace patternforge::tools {

namespace {

Rgb random_colour(SplitMix64& rng) {
  return {static_cast<std::uint8_t>(rng.uniform_int(0, 255)), static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
          static_cast<std::uint8_t>(rng.uniform_int(0, 255))};
}

}  // namespace

Image synthetic_image(std::uint64_t seed, std::size_t index, int width, int height) {
  SplitMix64 rng(derive_seed(seed, "synthetic", index));
  Image img(width, height);
  const Rgb a = random_colour(rng);
  const Rgb b = random_colour(rng);
  const double angle = rng.uniform(0.0, 6.283185307179586);
  const double cx = std::cos(angle);
  const double cy = std::sin(angle);
  const double span = std::abs(cx) * width + std::abs(cy) * height;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double t = std::clamp(((x - width / 2.0) * cx + (y - height / 2.0) * cy) / span + 0.5, 0.0, 1.0);
      img.set(x, y,
              {clamp_u8(a.r + t * (b.r - a.r)), clamp_u8(a.g + t * (b.g - a.g)), clamp_u8(a.b + t * (b.b - a.b))});
    }
  }
  const auto shapes = rng.uniform_int(4, 8);
  for (std::int64_t s = 0; s < shapes; ++s) {
    const Rgb c = random_colour(rng);
    const auto kind = rng.uniform_int(0, 2);
    const double px = rng.uniform(0.0, width);
    const double py = rng.uniform(0.0, height);
    const double r = rng.uniform(0.08, 0.3) * std::min(width, height);
    const double r2 = rng.uniform(0.08, 0.3) * std::min(width, height);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double dx = x + 0.5 - px;
        const double dy = y + 0.5 - py;
        bool inside = false;
        if (kind == 0) inside = dx * dx + dy * dy <= r * r;
        else if (kind == 1) inside = std::abs(dx) <= r && std::abs(dy) <= r2;
        else inside = std::abs(dx * cy - dy * cx) <= r * 0.25;
        if (inside) img.set(x, y, c);
      }
    }
  }
  return img;
}

std::vector<SourceEntry> write_synthetic_sources(const std::filesystem::path& dir, std::size_t count,
                                                 std::uint64_t seed, const std::string& prefix, int width,
                                                 int height) {
  std::filesystem::create_directories(dir);
  std::vector<SourceEntry> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%05zu", i);
    const std::string id = prefix + name;
    const auto path = dir / (id + ".png");
    write_png(synthetic_image(seed, i, width, height), path);
    out.push_back({id, path});
  }
  return out;
}

}  // namespace patternforge::tools
