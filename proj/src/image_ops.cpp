#include "patternforge/image_ops.hpp"

#include <vector>

#include "patternforge/errors.hpp"

namespace patternforge {

void sample_clamped(const Image& src, double x, double y, double out[3]) noexcept {
  const double max_x = src.width() - 1;
  const double max_y = src.height() - 1;
  x = std::clamp(x, 0.0, max_x);
  y = std::clamp(y, 0.0, max_y);
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, src.width() - 1);
  const int y1 = std::min(y0 + 1, src.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const auto* p00 = src.pixel(x0, y0);
  const auto* p10 = src.pixel(x1, y0);
  const auto* p01 = src.pixel(x0, y1);
  const auto* p11 = src.pixel(x1, y1);
  for (int c = 0; c < 3; ++c) {
    const double top = p00[c] + fx * (p10[c] - p00[c]);
    const double bottom = p01[c] + fx * (p11[c] - p01[c]);
    out[c] = top + fy * (bottom - top);
  }
}

void sample_or_fill(const Image& src, double x, double y, Rgb fill, double out[3]) noexcept {
  if (!(x >= -0.5 && y >= -0.5 && x <= src.width() - 0.5 && y <= src.height() - 0.5)) {
    out[0] = fill.r;
    out[1] = fill.g;
    out[2] = fill.b;
    return;
  }
  sample_clamped(src, x, y, out);
}

Image resize_bilinear(const Image& src, int width, int height) {
  if (width == src.width() && height == src.height()) return src;
  const double sx = static_cast<double>(src.width()) / width;
  const double sy = static_cast<double>(src.height()) / height;
  return warp_clamped(src, width, height, [&](double x, double y) {
    return Eigen::Vector2d((x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5);
  });
}

Image crop(const Image& src, int x, int y, int width, int height) {
  if (x < 0 || y < 0 || width < 1 || height < 1 || x + width > src.width() ||
      y + height > src.height()) {
    throw PatternError("crop rectangle outside image");
  }
  Image out(width, height);
  for (int row = 0; row < height; ++row) {
    std::copy_n(src.pixel(x, y + row), static_cast<std::size_t>(width) * 3, out.pixel(0, row));
  }
  return out;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

std::vector<double> gaussian_blur(const Image& src, double sigma_x, double sigma_y) {
  const int w = src.width();
  const int h = src.height();
  const auto kx = gaussian_kernel(sigma_x);
  const auto ky = gaussian_kernel(sigma_y);
  const int rx = static_cast<int>(kx.size() / 2);
  const int ry = static_cast<int>(ky.size() / 2);

  std::vector<double> tmp(static_cast<std::size_t>(w) * h * 3, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0, 0, 0};
      for (int i = -rx; i <= rx; ++i) {
        const auto* p = src.pixel(std::clamp(x + i, 0, w - 1), y);
        const double weight = kx[i + rx];
        for (int c = 0; c < 3; ++c) acc[c] += weight * p[c];
      }
      for (int c = 0; c < 3; ++c) tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc[c];
    }
  }
  std::vector<double> out(tmp.size(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0, 0, 0};
      for (int i = -ry; i <= ry; ++i) {
        const std::size_t base = (static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x) * 3;
        const double weight = ky[i + ry];
        for (int c = 0; c < 3; ++c) acc[c] += weight * tmp[base + c];
      }
      for (int c = 0; c < 3; ++c) out[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc[c];
    }
  }
  return out;
}

Eigen::MatrixXd luma_plane(const Image& src) {
  Eigen::MatrixXd plane(src.height(), src.width());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const auto* p = src.pixel(x, y);
      plane(y, x) = luma601(p[0], p[1], p[2]);
    }
  }
  return plane;
}

}  // namespace patternforge
