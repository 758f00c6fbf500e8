#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <vector>

#include "pattern_impl.hpp"
#include "patternforge/image_ops.hpp"

namespace patternforge::detail {

namespace {

Rgb random_colour(SplitMix64& rng) {
  return {static_cast<std::uint8_t>(rng.uniform_int(0, 255)), static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
          static_cast<std::uint8_t>(rng.uniform_int(0, 255))};
}

void blend_pixel(Image& img, int x, int y, Rgb c, double opacity) {
  auto* p = img.pixel(x, y);
  p[0] = clamp_u8((1 - opacity) * p[0] + opacity * c.r);
  p[1] = clamp_u8((1 - opacity) * p[1] + opacity * c.g);
  p[2] = clamp_u8((1 - opacity) * p[2] + opacity * c.b);
}

// Even-odd rule.
bool inside_polygon(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x()) {
      in = !in;
    }
  }
  return in;
}

std::vector<Eigen::Vector2d> regular_polygon(const Eigen::Vector2d& c, double r, int corners,
                                             double rotation, double inner_ratio) {
  const int n = inner_ratio > 0 ? 2 * corners : corners;
  std::vector<Eigen::Vector2d> poly;
  for (int i = 0; i < n; ++i) {
    const double angle = rotation + 2.0 * std::numbers::pi * i / n;
    const double radius = (inner_ratio > 0 && i % 2 == 1) ? r * inner_ratio : r;
    poly.emplace_back(c.x() + radius * std::cos(angle), c.y() + radius * std::sin(angle));
  }
  return poly;
}

}  // namespace

Image add_stripes(const Image& src, const PatternContext& ctx) {
  const bool vertical = ctx.integer("axis") == 0;
  const int extent = vertical ? src.width() : src.height();
  const int count = ctx.integer("count");
  const double spacing = static_cast<double>(extent) / count;
  const double thickness = std::max(1.0, ctx.real("width") * extent);
  const double offset = ctx.real("offset") * spacing;
  const double opacity = ctx.real("opacity");
  auto rng = ctx.pixel_rng();

  Image out = src;
  for (int s = 0; s < count; ++s) {
    const Rgb colour = random_colour(rng);
    const double start = offset + s * spacing;
    for (int t = 0; t < extent; ++t) {
      const double centre = t + 0.5;
      if (centre < start || centre >= start + thickness) continue;
      if (vertical) {
        for (int y = 0; y < src.height(); ++y) blend_pixel(out, t, y, colour, opacity);
      } else {
        for (int x = 0; x < src.width(); ++x) blend_pixel(out, x, t, colour, opacity);
      }
    }
  }
  return out;
}

Image add_shapes(const Image& src, const PatternContext& ctx) {
  const int count = ctx.integer("count");
  const double size = ctx.real("size") * std::min(src.width(), src.height()) / 2.0;
  auto rng = ctx.pixel_rng();
  Image out = src;

  for (int s = 0; s < count; ++s) {
    const auto kind = rng.uniform_int(0, 4);  // ellipse, rectangle, triangle, star, pentagon
    const Eigen::Vector2d c(rng.uniform(0.0, src.width()), rng.uniform(0.0, src.height()));
    const double r = std::max(0.5, size * rng.uniform(0.6, 1.0));
    const double rotation = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double aspect = rng.uniform(0.5, 1.0);
    const Rgb colour = random_colour(rng);

    std::vector<Eigen::Vector2d> poly;
    switch (kind) {
      case 1: {
        const Eigen::Vector2d u(std::cos(rotation), std::sin(rotation));
        const Eigen::Vector2d v(-u.y(), u.x());
        poly = {c + r * u + aspect * r * v, c - r * u + aspect * r * v, c - r * u - aspect * r * v,
                c + r * u - aspect * r * v};
        break;
      }
      case 2: poly = regular_polygon(c, r, 3, rotation, 0.0); break;
      case 3: poly = regular_polygon(c, r, 5, rotation, 0.45); break;
      case 4: poly = regular_polygon(c, r, 5, rotation, 0.0); break;
      default: break;
    }
    const double cr = std::cos(rotation), sr = std::sin(rotation);
    for (int y = 0; y < src.height(); ++y) {
      for (int x = 0; x < src.width(); ++x) {
        const Eigen::Vector2d p(x + 0.5, y + 0.5);
        bool hit = false;
        if (kind == 0) {
          const Eigen::Vector2d d = p - c;
          const double u = (cr * d.x() + sr * d.y()) / r;
          const double v = (-sr * d.x() + cr * d.y()) / (aspect * r);
          hit = u * u + v * v <= 1.0;
        } else {
          hit = inside_polygon(poly, p);
        }
        if (hit) out.set(x, y, colour);
      }
    }
  }
  return out;
}

Image erasing(const Image& src, const PatternContext& ctx) {
  const double area = ctx.real("area") * static_cast<double>(src.pixel_count());
  const double aspect = ctx.real("aspect");
  const int ew = std::clamp(static_cast<int>(std::lround(std::sqrt(area * aspect))), 1, src.width());
  const int eh = std::clamp(static_cast<int>(std::lround(std::sqrt(area / aspect))), 1, src.height());
  const int x0 = static_cast<int>(std::lround(ctx.real("cx") * (src.width() - ew)));
  const int y0 = static_cast<int>(std::lround(ctx.real("cy") * (src.height() - eh)));
  const Rgb colour{static_cast<std::uint8_t>(ctx.integer("r")), static_cast<std::uint8_t>(ctx.integer("g")),
                   static_cast<std::uint8_t>(ctx.integer("b"))};
  Image out = src;
  for (int y = y0; y < y0 + eh; ++y) {
    for (int x = x0; x < x0 + ew; ++x) out.set(x, y, colour);
  }
  return out;
}

}  // namespace patternforge::detail
