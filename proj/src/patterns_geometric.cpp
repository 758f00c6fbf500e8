#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "pattern_impl.hpp"
#include "patternforge/image_ops.hpp"

namespace patternforge::detail {

namespace {

constexpr Rgb kBlack{0, 0, 0};

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

Eigen::Vector2d centre_of(const Image& img) {
  return {(img.width() - 1) / 2.0, (img.height() - 1) / 2.0};
}

// Piecewise-linear 1-D map over [0, extent] in pixel-edge coordinates. Node
// positions are uniform in the output and jittered in the source.
class PiecewiseAxis {
 public:
  PiecewiseAxis(int extent, int steps, double limit, SplitMix64& rng) : out_(steps + 1), src_(steps + 1) {
    const double cell = static_cast<double>(extent) / steps;
    for (int i = 0; i <= steps; ++i) {
      out_[i] = i * cell;
      src_[i] = out_[i];
      if (i > 0 && i < steps) src_[i] += rng.uniform(-limit, limit) * cell;
    }
  }

  double map(double u) const {
    std::size_t i = 0;
    while (i + 2 < out_.size() && u > out_[i + 1]) ++i;
    const double t = (u - out_[i]) / (out_[i + 1] - out_[i]);
    return src_[i] + t * (src_[i + 1] - src_[i]);
  }

 private:
  std::vector<double> out_;
  std::vector<double> src_;
};

}  // namespace

Image resize_crop(const Image& src, const PatternContext& ctx) {
  const double scale = ctx.real("scale");
  const double cw = scale * src.width();
  const double ch = scale * src.height();
  const double x0 = ctx.real("cx") * (src.width() - cw);
  const double y0 = ctx.real("cy") * (src.height() - ch);
  return warp_clamped(src, src.width(), src.height(), [&](double x, double y) -> Eigen::Vector2d {
    return {x0 + (x + 0.5) * scale - 0.5, y0 + (y + 0.5) * scale - 0.5};
  });
}

Image rotate(const Image& src, const PatternContext& ctx) {
  const Eigen::Rotation2Dd inverse(-radians(ctx.real("angle")));
  const Eigen::Vector2d c = centre_of(src);
  return warp(src, src.width(), src.height(),
              [&](double x, double y) -> Eigen::Vector2d { return inverse * (Eigen::Vector2d(x, y) - c) + c; },
              kBlack);
}

Image padding(const Image& src, const PatternContext& ctx) {
  auto pixels = [](double fraction, int extent) {
    return static_cast<int>(std::lround(fraction * extent));
  };
  const int left = pixels(ctx.real("left"), src.width());
  const int right = pixels(ctx.real("right"), src.width());
  const int top = pixels(ctx.real("top"), src.height());
  const int bottom = pixels(ctx.real("bottom"), src.height());
  const Rgb colour{static_cast<std::uint8_t>(ctx.integer("r")), static_cast<std::uint8_t>(ctx.integer("g")),
                   static_cast<std::uint8_t>(ctx.integer("b"))};
  Image out(src.width() + left + right, src.height() + top + bottom, colour);
  for (int y = 0; y < src.height(); ++y) {
    std::copy_n(src.pixel(0, y), static_cast<std::size_t>(src.width()) * 3, out.pixel(left, top + y));
  }
  return out;
}

Image vert_flip(const Image& src, const PatternContext&) {
  Image out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    std::copy_n(src.pixel(0, src.height() - 1 - y), static_cast<std::size_t>(src.width()) * 3,
                out.pixel(0, y));
  }
  return out;
}

Image hori_flip(const Image& src, const PatternContext&) {
  Image out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) out.set(x, y, src.get(src.width() - 1 - x, y));
  }
  return out;
}

Image persp_change(const Image& src, const PatternContext& ctx) {
  const double w = src.width() - 1;
  const double h = src.height() - 1;
  if (w < 1 || h < 1) return src;

  // Source corners move to displaced output corners; solve the homography
  // that maps output coordinates back to the source.
  const std::array<Eigen::Vector2d, 4> source = {
      Eigen::Vector2d(0, 0), Eigen::Vector2d(w, 0), Eigen::Vector2d(w, h), Eigen::Vector2d(0, h)};
  std::array<Eigen::Vector2d, 4> moved;
  for (int i = 0; i < 4; ++i) {
    const std::string k = "d" + std::to_string(i);
    moved[i] = source[i] + Eigen::Vector2d(ctx.real(k + "x") * src.width(), ctx.real(k + "y") * src.height());
  }
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const double u = moved[i].x(), v = moved[i].y();
    const double x = source[i].x(), y = source[i].y();
    a.row(2 * i) << u, v, 1, 0, 0, 0, -u * x, -v * x;
    a.row(2 * i + 1) << 0, 0, 0, u, v, 1, -u * y, -v * y;
    b(2 * i) = x;
    b(2 * i + 1) = y;
  }
  const auto lu = a.fullPivLu();
  if (!lu.isInvertible()) return src;
  const Eigen::Matrix<double, 8, 1> hv = lu.solve(b);
  Eigen::Matrix3d hom;
  hom << hv(0), hv(1), hv(2), hv(3), hv(4), hv(5), hv(6), hv(7), 1.0;
  return warp(src, src.width(), src.height(),
              [&](double x, double y) -> Eigen::Vector2d {
                const Eigen::Vector3d p = hom * Eigen::Vector3d(x, y, 1.0);
                if (std::abs(p.z()) < 1e-12) return {-1e9, -1e9};
                return p.hnormalized();
              },
              kBlack);
}

Image skew(const Image& src, const PatternContext& ctx) {
  const double shear = std::tan(radians(ctx.real("angle")));
  const bool horizontal = ctx.integer("axis") == 0;
  const Eigen::Vector2d c = centre_of(src);
  return warp(src, src.width(), src.height(),
              [&](double x, double y) -> Eigen::Vector2d {
                if (horizontal) return {x - shear * (y - c.y()), y};
                return {x, y - shear * (x - c.x())};
              },
              kBlack);
}

Image shuf_pixels(const Image& src, const PatternContext& ctx) {
  const std::size_t n = src.pixel_count();
  const auto chosen = static_cast<std::size_t>(std::lround(ctx.real("fraction") * static_cast<double>(n)));
  auto rng = ctx.pixel_rng();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `chosen` slots are a uniform subset.
  for (std::size_t i = 0; i < chosen && i + 1 < n; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                            static_cast<std::int64_t>(n - 1)));
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> targets(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(chosen));
  std::vector<std::size_t> sources = targets;
  rng.shuffle(std::span(sources));

  Image out = src;
  auto in = src.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(sources[i] * 3), 3,
                dst.begin() + static_cast<std::ptrdiff_t>(targets[i] * 3));
  }
  return out;
}

Image grid_distort(const Image& src, const PatternContext& ctx) {
  auto rng = ctx.pixel_rng();
  const int steps = ctx.integer("steps");
  const double limit = ctx.real("limit");
  const PiecewiseAxis ax(src.width(), steps, limit, rng);
  const PiecewiseAxis ay(src.height(), steps, limit, rng);
  return warp_clamped(src, src.width(), src.height(), [&](double x, double y) -> Eigen::Vector2d {
    return {ax.map(x + 0.5) - 0.5, ay.map(y + 0.5) - 0.5};
  });
}

Image swirl(const Image& src, const PatternContext& ctx) {
  const double strength = ctx.real("strength");
  const double radius = ctx.real("radius") * std::min(src.width(), src.height());
  const double decay = std::numbers::ln2 * radius / 5.0;
  const Eigen::Vector2d c(ctx.real("cx") * (src.width() - 1), ctx.real("cy") * (src.height() - 1));
  return warp_clamped(src, src.width(), src.height(), [&](double x, double y) -> Eigen::Vector2d {
    const Eigen::Vector2d d = Eigen::Vector2d(x, y) - c;
    const double rho = d.norm();
    const double theta = std::atan2(d.y(), d.x()) + strength * std::exp(-rho / std::max(decay, 1e-9));
    return c + rho * Eigen::Vector2d(std::cos(theta), std::sin(theta));
  });
}

}  // namespace patternforge::detail
