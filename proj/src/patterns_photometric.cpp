#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "pattern_impl.hpp"
#include "patternforge/image_ops.hpp"

namespace patternforge::detail {

namespace {

template <typename F>
Image map_samples(const Image& src, F&& f) {
  Image out = src;
  auto s = out.samples();
  for (std::size_t i = 0; i < s.size(); i += 3) {
    for (int c = 0; c < 3; ++c) s[i + c] = f(s[i + c], c);
  }
  return out;
}

struct Rect {
  int x = 0, y = 0, w = 1, h = 1;
};

// Region of relative size `extent` whose top-left corner sits at fraction
// (cx, cy) of the free space.
Rect region(const Image& src, double extent, double cx, double cy) {
  Rect r;
  r.w = fraction_to_pixels(extent, src.width());
  r.h = fraction_to_pixels(extent, src.height());
  r.x = static_cast<int>(std::lround(cx * (src.width() - r.w)));
  r.y = static_cast<int>(std::lround(cy * (src.height() - r.h)));
  return r;
}

std::array<double, 3> block_mean(const Image& src, int x0, int y0, int x1, int y1) {
  std::array<double, 3> acc{0, 0, 0};
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const auto* p = src.pixel(x, y);
      for (int c = 0; c < 3; ++c) acc[c] += p[c];
    }
  }
  const double n = static_cast<double>(x1 - x0) * (y1 - y0);
  for (double& v : acc) v /= n;
  return acc;
}

}  // namespace

Image gray_scale(const Image& src, const PatternContext&) {
  Image out = src;
  auto s = out.samples();
  for (std::size_t i = 0; i < s.size(); i += 3) {
    const std::uint8_t y = clamp_u8(luma601(s[i], s[i + 1], s[i + 2]));
    s[i] = s[i + 1] = s[i + 2] = y;
  }
  return out;
}

Image color_jitter(const Image& src, const PatternContext& ctx) {
  const double brightness = ctx.real("brightness");
  const double contrast = ctx.real("contrast");
  const double saturation = ctx.real("saturation");
  const double hue = ctx.real("hue") * 2.0 * std::numbers::pi;

  const auto in = src.samples();
  const std::size_t n = src.pixel_count();
  std::vector<double> v(in.begin(), in.end());
  for (double& x : v) x *= brightness;

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += luma601(v[3 * i], v[3 * i + 1], v[3 * i + 2]);
  mean /= static_cast<double>(n);

  const double ch = std::cos(hue), sh = std::sin(hue);
  Image out(src.width(), src.height());
  auto o = out.samples();
  for (std::size_t i = 0; i < n; ++i) {
    double r = mean + contrast * (v[3 * i] - mean);
    double g = mean + contrast * (v[3 * i + 1] - mean);
    double b = mean + contrast * (v[3 * i + 2] - mean);
    const double y = luma601(r, g, b);
    r = y + saturation * (r - y);
    g = y + saturation * (g - y);
    b = y + saturation * (b - y);
    // Hue rotation in YIQ.
    const double yy = 0.299 * r + 0.587 * g + 0.114 * b;
    const double ii = 0.596 * r - 0.274 * g - 0.322 * b;
    const double qq = 0.211 * r - 0.523 * g + 0.312 * b;
    const double i2 = ch * ii - sh * qq;
    const double q2 = sh * ii + ch * qq;
    o[3 * i] = clamp_u8(yy + 0.956 * i2 + 0.621 * q2);
    o[3 * i + 1] = clamp_u8(yy - 0.272 * i2 - 0.647 * q2);
    o[3 * i + 2] = clamp_u8(yy - 1.106 * i2 + 1.703 * q2);
  }
  return out;
}

Image blur(const Image& src, const PatternContext& ctx) {
  const auto blurred = gaussian_blur(src, ctx.real("sigma_x"), ctx.real("sigma_y"));
  Image out(src.width(), src.height());
  auto o = out.samples();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = clamp_u8(blurred[i]);
  return out;
}

Image pixelate(const Image& src, const PatternContext& ctx) {
  const int block = ctx.integer("block");
  const Rect r = region(src, ctx.real("extent"), ctx.real("cx"), ctx.real("cy"));
  Image out = src;
  for (int by = r.y; by < r.y + r.h; by += block) {
    for (int bx = r.x; bx < r.x + r.w; bx += block) {
      const int ex = std::min(bx + block, r.x + r.w);
      const int ey = std::min(by + block, r.y + r.h);
      const auto m = block_mean(src, bx, by, ex, ey);
      const Rgb c{clamp_u8(m[0]), clamp_u8(m[1]), clamp_u8(m[2])};
      for (int y = by; y < ey; ++y) {
        for (int x = bx; x < ex; ++x) out.set(x, y, c);
      }
    }
  }
  return out;
}

Image add_noise(const Image& src, const PatternContext& ctx) {
  const double sigma = ctx.real("sigma");
  auto rng = ctx.pixel_rng();
  return map_samples(src, [&](std::uint8_t v, int) { return clamp_u8(v + sigma * rng.normal()); });
}

Image change_chan(const Image& src, const PatternContext& ctx) {
  static constexpr std::array<std::array<int, 3>, 6> kPerms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  const auto& perm = kPerms[static_cast<std::size_t>(ctx.integer("perm"))];
  const int invert = ctx.integer("invert_mask");
  const int shifted = ctx.integer("shift_channel");
  const double dx = ctx.real("shift_x") * src.width();
  const double dy = ctx.real("shift_y") * src.height();

  Image out(src.width(), src.height());
  double v[3];
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      sample_clamped(src, x - dx, y - dy, v);
      const auto* p = src.pixel(x, y);
      std::array<double, 3> chans = {double(p[0]), double(p[1]), double(p[2])};
      chans[static_cast<std::size_t>(shifted)] = v[shifted];
      auto* o = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) {
        double s = chans[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])];
        if (invert & (1 << c)) s = 255.0 - s;
        o[c] = clamp_u8(s);
      }
    }
  }
  return out;
}

Image enc_quality(const Image& src, const PatternContext& ctx) {
  // Rolling the raster before encoding moves the 8x8 block grid.
  const int ox = ctx.integer("offset_x") % src.width();
  const int oy = ctx.integer("offset_y") % src.height();
  const int w = src.width(), h = src.height();
  Image rolled(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) rolled.set((x + ox) % w, (y + oy) % h, src.get(x, y));
  }
  JpegOptions options;
  options.quality = ctx.real("quality");
  options.subsample_chroma = ctx.integer("subsample") == 1;
  const Image decoded = decode_jpeg(encode_jpeg(rolled, options));
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.set(x, y, decoded.get((x + ox) % w, (y + oy) % h));
  }
  return out;
}

Image sharpen(const Image& src, const PatternContext& ctx) {
  const double amount = ctx.real("amount");
  const double sigma = ctx.real("sigma");
  const auto blurred = gaussian_blur(src, sigma, sigma);
  Image out(src.width(), src.height());
  auto in = src.samples();
  auto o = out.samples();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = clamp_u8(in[i] + amount * (in[i] - blurred[i]));
  return out;
}

Image solarize(const Image& src, const PatternContext& ctx) {
  const std::array<int, 3> t = {ctx.integer("threshold_r"), ctx.integer("threshold_g"),
                                ctx.integer("threshold_b")};
  return map_samples(src, [&](std::uint8_t v, int c) {
    return v >= t[static_cast<std::size_t>(c)] ? static_cast<std::uint8_t>(255 - v) : v;
  });
}

Image posterize(const Image& src, const PatternContext& ctx) {
  const std::array<int, 3> levels = {ctx.integer("levels_r"), ctx.integer("levels_g"),
                                     ctx.integer("levels_b")};
  return map_samples(src, [&](std::uint8_t v, int c) {
    const double steps = levels[static_cast<std::size_t>(c)] - 1;
    return clamp_u8(std::round(v * steps / 255.0) * 255.0 / steps);
  });
}

Image gamma(const Image& src, const PatternContext& ctx) {
  const double g = ctx.real("gamma");
  const double gain = ctx.real("gain");
  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) lut[static_cast<std::size_t>(v)] = clamp_u8(255.0 * gain * std::pow(v / 255.0, g));
  return map_samples(src, [&](std::uint8_t v, int) { return lut[v]; });
}

Image mosaic(const Image& src, const PatternContext& ctx) {
  const int tile = ctx.integer("tile");
  const Rect r = region(src, ctx.real("extent"), ctx.real("cx"), ctx.real("cy"));
  auto rng = ctx.pixel_rng();
  Image out = src;
  for (int ty = r.y; ty < r.y + r.h; ty += tile) {
    for (int tx = r.x; tx < r.x + r.w; tx += tile) {
      const int ex = std::min(tx + tile, r.x + r.w);
      const int ey = std::min(ty + tile, r.y + r.h);
      auto m = block_mean(src, tx, ty, ex, ey);
      const double glaze = rng.uniform(0.85, 1.15);
      const Rgb c{clamp_u8(m[0] * glaze), clamp_u8(m[1] * glaze), clamp_u8(m[2] * glaze)};
      const Rgb grout{clamp_u8(m[0] * 0.35), clamp_u8(m[1] * 0.35), clamp_u8(m[2] * 0.35)};
      for (int y = ty; y < ey; ++y) {
        for (int x = tx; x < ex; ++x) {
          const bool edge = (x == tx || y == ty) && tile > 2;
          out.set(x, y, edge ? grout : c);
        }
      }
    }
  }
  return out;
}

Image voronoi(const Image& src, const PatternContext& ctx) {
  const int w = src.width(), h = src.height();
  const auto n = static_cast<std::size_t>(ctx.integer("sites"));
  auto rng = ctx.pixel_rng();
  std::vector<Eigen::Vector2d> sites(n);
  for (auto& s : sites) s = {rng.uniform(0.0, w), rng.uniform(0.0, h)};

  std::vector<std::size_t> owner(static_cast<std::size_t>(w) * h);
  std::vector<std::array<double, 4>> acc(n, {0, 0, 0, 0});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Eigen::Vector2d p(x + 0.5, y + 0.5);
      std::size_t best = 0;
      double best_d = (sites[0] - p).squaredNorm();
      for (std::size_t i = 1; i < n; ++i) {
        const double d = (sites[i] - p).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      owner[static_cast<std::size_t>(y) * w + x] = best;
      const auto* px = src.pixel(x, y);
      acc[best][0] += px[0];
      acc[best][1] += px[1];
      acc[best][2] += px[2];
      acc[best][3] += 1.0;
    }
  }
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto& a = acc[owner[static_cast<std::size_t>(y) * w + x]];
      out.set(x, y, {clamp_u8(a[0] / a[3]), clamp_u8(a[1] / a[3]), clamp_u8(a[2] / a[3])});
    }
  }
  return out;
}

Image wave_block(const Image& src, const PatternContext& ctx) {
  const bool rows = ctx.integer("axis") == 0;
  const int extent = rows ? src.height() : src.width();
  const int band = fraction_to_pixels(ctx.real("band"), extent);
  const int start = static_cast<int>(std::lround(ctx.real("position") * (extent - band)));
  const double factor = ctx.real("factor");
  Image out = src;
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const int t = rows ? y : x;
      if (t >= start && t < start + band) continue;
      auto* p = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) p[c] = clamp_u8(p[c] * factor);
    }
  }
  return out;
}

Image oil_paint(const Image& src, const PatternContext& ctx) {
  const int radius = ctx.integer("radius");
  const double levels = ctx.real("levels");
  const double phase = ctx.real("phase");
  const int w = src.width(), h = src.height();
  const int bins = static_cast<int>(std::ceil(levels)) + 2;

  std::vector<int> bin_of(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto* p = src.pixel(x, y);
      const double intensity = luma601(p[0], p[1], p[2]);
      bin_of[static_cast<std::size_t>(y) * w + x] =
          std::clamp(static_cast<int>(std::floor(intensity * levels / 256.0 + phase)), 0, bins - 1);
    }
  }

  Image out(w, h);
  std::vector<int> count(static_cast<std::size_t>(bins));
  std::vector<std::array<double, 3>> sum(static_cast<std::size_t>(bins));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::fill(count.begin(), count.end(), 0);
      std::fill(sum.begin(), sum.end(), std::array<double, 3>{0, 0, 0});
      for (int ny = std::max(0, y - radius); ny <= std::min(h - 1, y + radius); ++ny) {
        for (int nx = std::max(0, x - radius); nx <= std::min(w - 1, x + radius); ++nx) {
          const auto b = static_cast<std::size_t>(bin_of[static_cast<std::size_t>(ny) * w + nx]);
          const auto* p = src.pixel(nx, ny);
          ++count[b];
          for (int c = 0; c < 3; ++c) sum[b][static_cast<std::size_t>(c)] += p[c];
        }
      }
      std::size_t mode = 0;
      for (std::size_t b = 1; b < count.size(); ++b) {
        if (count[b] > count[mode]) mode = b;
      }
      const double n = count[mode];
      out.set(x, y, {clamp_u8(sum[mode][0] / n), clamp_u8(sum[mode][1] / n), clamp_u8(sum[mode][2] / n)});
    }
  }
  return out;
}

}  // namespace patternforge::detail
