#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>

#include "patternforge/image.hpp"

namespace patternforge {

/// Round half away from zero, then clamp into [0, 255].
inline std::uint8_t clamp_u8(double v) noexcept {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::round(v));
}

/// BT.601 luma of an RGB triple.
inline double luma601(double r, double g, double b) noexcept {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

/// Bilinear sample at continuous pixel-centre coordinates (pixel i has its
/// centre at i). Coordinates are clamped to the image (edge replicate).
void sample_clamped(const Image& src, double x, double y, double out[3]) noexcept;

/// Bilinear sample; points farther than half a pixel outside the raster get
/// `fill`, points inside are edge-clamped.
void sample_or_fill(const Image& src, double x, double y, Rgb fill, double out[3]) noexcept;

/// Generic inverse warp: `map(x, y)` returns the source coordinate for output
/// pixel centre (x, y).
template <typename Map>
Image warp(const Image& src, int out_width, int out_height, Map&& map, Rgb fill) {
  Image out(out_width, out_height);
  double v[3];
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const Eigen::Vector2d s = map(static_cast<double>(x), static_cast<double>(y));
      sample_or_fill(src, s.x(), s.y(), fill, v);
      out.set(x, y, {clamp_u8(v[0]), clamp_u8(v[1]), clamp_u8(v[2])});
    }
  }
  return out;
}

/// Same as warp() but every source coordinate is edge-clamped.
template <typename Map>
Image warp_clamped(const Image& src, int out_width, int out_height, Map&& map) {
  Image out(out_width, out_height);
  double v[3];
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const Eigen::Vector2d s = map(static_cast<double>(x), static_cast<double>(y));
      sample_clamped(src, s.x(), s.y(), v);
      out.set(x, y, {clamp_u8(v[0]), clamp_u8(v[1]), clamp_u8(v[2])});
    }
  }
  return out;
}

/// Bilinear resize with pixel-centre alignment.
Image resize_bilinear(const Image& src, int width, int height);

/// Copy of the rectangle [x, x+w) x [y, y+h); the rectangle must lie inside.
Image crop(const Image& src, int x, int y, int width, int height);

/// Per-channel separable Gaussian blur in floating point, edge-clamped.
/// Returns unrounded samples (row-major, 3 per pixel).
std::vector<double> gaussian_blur(const Image& src, double sigma_x, double sigma_y);

/// Luma plane as a dense matrix (rows = height).
Eigen::MatrixXd luma_plane(const Image& src);

}  // namespace patternforge
