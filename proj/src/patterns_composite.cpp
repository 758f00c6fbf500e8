#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pattern_impl.hpp"
#include "patternforge/image_ops.hpp"

namespace patternforge::detail {

namespace {

// Renders a zoomed window of `src` into a width x height raster. The window
// covers 1/zoom of each side; pan in [0, 1] picks its position.
Image zoomed_view(const Image& src, int width, int height, double zoom, double pan_x, double pan_y) {
  const double ww = src.width() / zoom;
  const double wh = src.height() / zoom;
  const double ox = pan_x * (src.width() - ww);
  const double oy = pan_y * (src.height() - wh);
  return warp_clamped(src, width, height, [&](double x, double y) -> Eigen::Vector2d {
    return {ox + (x + 0.5) * ww / width - 0.5, oy + (y + 0.5) * wh / height - 0.5};
  });
}

void paste(Image& dst, const Image& src, int x0, int y0) {
  for (int y = 0; y < src.height(); ++y) {
    std::copy_n(src.pixel(0, y), static_cast<std::size_t>(src.width()) * 3, dst.pixel(x0, y0 + y));
  }
}

std::vector<int> jittered_cuts(int extent, int cells, double jitter, SplitMix64& rng) {
  std::vector<int> cuts(static_cast<std::size_t>(cells) + 1);
  cuts[0] = 0;
  cuts[static_cast<std::size_t>(cells)] = extent;
  const double cell = static_cast<double>(extent) / cells;
  for (int i = 1; i < cells; ++i) {
    const double pos = i * cell + rng.uniform(-jitter, jitter) * cell;
    const int lo = cuts[static_cast<std::size_t>(i) - 1] + 1;
    const int hi = extent - (cells - i);
    cuts[static_cast<std::size_t>(i)] = std::clamp(static_cast<int>(std::lround(pos)), lo, hi);
  }
  return cuts;
}

}  // namespace

Image blend(const Image& src, const PatternContext& ctx) {
  const double alpha = ctx.real("alpha");
  const Image other = zoomed_view(ctx.partner(src), src.width(), src.height(), ctx.real("zoom"),
                                  ctx.real("pan_x"), ctx.real("pan_y"));
  Image out(src.width(), src.height());
  auto a = src.samples();
  auto b = other.samples();
  auto o = out.samples();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = clamp_u8((1.0 - alpha) * a[i] + alpha * b[i]);
  return out;
}

Image stack_image(const Image& src, const PatternContext& ctx) {
  const bool side_by_side = ctx.integer("axis") == 0;
  const bool partner_first = ctx.integer("partner_first") == 1;
  const Image partner = ctx.partner(src);
  const int pw = side_by_side ? fraction_to_pixels(ctx.real("extent"), src.width()) : src.width();
  const int ph = side_by_side ? src.height() : fraction_to_pixels(ctx.real("extent"), src.height());
  const Image view = zoomed_view(partner, pw, ph, ctx.real("zoom"), ctx.real("pan_x"), ctx.real("pan_y"));

  const int ow = side_by_side ? src.width() + pw : src.width();
  const int oh = side_by_side ? src.height() : src.height() + ph;
  Image out(ow, oh);
  const Image& first = partner_first ? view : src;
  const Image& second = partner_first ? src : view;
  paste(out, first, 0, 0);
  if (side_by_side) {
    paste(out, second, first.width(), 0);
  } else {
    paste(out, second, 0, first.height());
  }
  return out;
}

Image repeat(const Image& src, const PatternContext& ctx) {
  const double tile = ctx.real("tile");
  const double tw = tile * src.width();
  const double th = tile * src.height();
  const double px = ctx.real("phase_x") * tw;
  const double py = ctx.real("phase_y") * th;
  return warp_clamped(src, src.width(), src.height(), [&](double x, double y) -> Eigen::Vector2d {
    return {std::fmod(x + 0.5 + px, tw) / tile - 0.5, std::fmod(y + 0.5 + py, th) / tile - 0.5};
  });
}

Image cut_assemble(const Image& src, const PatternContext& ctx) {
  auto rng = ctx.pixel_rng();
  const int cols = std::min(ctx.integer("cols"), src.width());
  const int rows = std::min(ctx.integer("rows"), src.height());
  const double jitter = ctx.real("jitter");
  const auto xs = jittered_cuts(src.width(), cols, jitter, rng);
  const auto ys = jittered_cuts(src.height(), rows, jitter, rng);

  std::vector<int> order(static_cast<std::size_t>(cols * rows));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span(order));

  auto cell = [&](int index) {
    const auto cx = static_cast<std::size_t>(index % cols);
    const auto cy = static_cast<std::size_t>(index / cols);
    return std::array<int, 4>{xs[cx], ys[cy], xs[cx + 1] - xs[cx], ys[cy + 1] - ys[cy]};
  };

  Image out(src.width(), src.height());
  for (int dst = 0; dst < cols * rows; ++dst) {
    const auto d = cell(dst);
    const auto s = cell(order[static_cast<std::size_t>(dst)]);
    paste(out, resize_bilinear(crop(src, s[0], s[1], s[2], s[3]), d[2], d[3]), d[0], d[1]);
  }
  return out;
}

Image cut_paste(const Image& src, const PatternContext& ctx) {
  const int pw = fraction_to_pixels(ctx.real("size"), src.width());
  const int ph = fraction_to_pixels(ctx.real("size"), src.height());
  auto place = [&](double fx, double fy) {
    return std::pair<int, int>{static_cast<int>(std::lround(fx * (src.width() - pw))),
                               static_cast<int>(std::lround(fy * (src.height() - ph)))};
  };
  const auto [ax, ay] = place(ctx.real("ax"), ctx.real("ay"));
  const auto [bx, by] = place(ctx.real("bx"), ctx.real("by"));
  Image out = src;
  paste(out, crop(src, bx, by, pw, ph), ax, ay);
  paste(out, crop(src, ax, ay, pw, ph), bx, by);
  return out;
}

Image pyramid(const Image& src, const PatternContext& ctx) {
  const int levels = ctx.integer("levels");
  const double ratio = ctx.real("ratio");
  const double w = src.width();
  const double h = src.height();
  Image out = src;
  double v[3];
  for (int level = 1; level < levels; ++level) {
    const double scale = std::pow(ratio, level);
    const double cw = scale * w;
    const double ch = scale * h;
    const double x0 = std::clamp(ctx.real("anchor_x") * w - cw / 2.0, 0.0, w - cw);
    const double y0 = std::clamp(ctx.real("anchor_y") * h - ch / 2.0, 0.0, h - ch);
    // one-pixel dark frame when there is room for it
    const double frame = cw > 3.0 && ch > 3.0 ? 1.0 : 0.0;
    const double iw = cw - 2 * frame;
    const double ih = ch - 2 * frame;
    for (int y = 0; y < src.height(); ++y) {
      const double cy = y + 0.5 - y0;
      if (cy < 0.0 || cy >= ch) continue;
      for (int x = 0; x < src.width(); ++x) {
        const double cx = x + 0.5 - x0;
        if (cx < 0.0 || cx >= cw) continue;
        const double ix = cx - frame;
        const double iy = cy - frame;
        if (ix < 0.0 || iy < 0.0 || ix >= iw || iy >= ih) {
          out.set(x, y, {0, 0, 0});
          continue;
        }
        sample_clamped(src, ix * w / iw - 0.5, iy * h / ih - 0.5, v);
        out.set(x, y, {clamp_u8(v[0]), clamp_u8(v[1]), clamp_u8(v[2])});
      }
    }
  }
  return out;
}

}  // namespace patternforge::detail
