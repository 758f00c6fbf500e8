#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "patternforge/errors.hpp"
#include "patternforge/image.hpp"
#include "patternforge/image_ops.hpp"

namespace patternforge {

inline constexpr double kUnitNormTolerance = 1e-5;
inline constexpr int kThumbnailSide = 16;
inline constexpr int kThumbnailDim = kThumbnailSide * kThumbnailSide;

/// Id-aligned matrix of unit-norm descriptors, one row per id.
template <typename Scalar>
struct DescriptorSet {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  std::vector<std::string> ids;
  Matrix vectors;

  Eigen::Index size() const noexcept { return vectors.rows(); }
  Eigen::Index dim() const noexcept { return vectors.cols(); }

  /// Row index of `id`, or -1.
  Eigen::Index find(std::string_view id) const {
    const auto it = std::find(ids.begin(), ids.end(), id);
    return it == ids.end() ? -1 : static_cast<Eigen::Index>(it - ids.begin());
  }
};

using Descriptors = DescriptorSet<float>;

/// Throws ShapeError / InputError unless ids are unique and aligned with the
/// rows, dim > 0 and every row is finite with unit L2 norm.
template <typename Scalar>
void validate(const DescriptorSet<Scalar>& set, double tolerance = kUnitNormTolerance) {
  if (set.dim() <= 0) throw ShapeError("descriptor dim must be positive");
  if (static_cast<Eigen::Index>(set.ids.size()) != set.size()) {
    throw ShapeError("descriptor ids (" + std::to_string(set.ids.size()) + ") do not match rows (" +
                     std::to_string(set.size()) + ")");
  }
  std::set<std::string_view> seen;
  for (const auto& id : set.ids) {
    if (!seen.insert(id).second) throw InputError("duplicate descriptor id " + id);
  }
  for (Eigen::Index r = 0; r < set.size(); ++r) {
    const auto row = set.vectors.row(r).template cast<double>();
    if (!row.allFinite()) throw InputError("descriptor " + set.ids[static_cast<std::size_t>(r)] + " is not finite");
    if (std::abs(row.norm() - 1.0) > tolerance) {
      throw InputError("descriptor " + set.ids[static_cast<std::size_t>(r)] + " is not unit-norm");
    }
  }
}

/// Baseline descriptor: 16x16 BT.601 luma thumbnail (bilinear), mean removed,
/// L2-normalized. A constant image maps to e1.
template <typename Scalar = float>
Eigen::Matrix<Scalar, kThumbnailDim, 1> thumbnail_descriptor(const Image& image) {
  const Eigen::MatrixXd luma = luma_plane(image);
  const double sx = static_cast<double>(image.width()) / kThumbnailSide;
  const double sy = static_cast<double>(image.height()) / kThumbnailSide;
  Eigen::Matrix<double, kThumbnailDim, 1> v;
  for (int ty = 0; ty < kThumbnailSide; ++ty) {
    const double y = std::clamp((ty + 0.5) * sy - 0.5, 0.0, luma.rows() - 1.0);
    const auto y0 = static_cast<Eigen::Index>(std::floor(y));
    const auto y1 = std::min<Eigen::Index>(y0 + 1, luma.rows() - 1);
    const double fy = y - static_cast<double>(y0);
    for (int tx = 0; tx < kThumbnailSide; ++tx) {
      const double x = std::clamp((tx + 0.5) * sx - 0.5, 0.0, luma.cols() - 1.0);
      const auto x0 = static_cast<Eigen::Index>(std::floor(x));
      const auto x1 = std::min<Eigen::Index>(x0 + 1, luma.cols() - 1);
      const double fx = x - static_cast<double>(x0);
      const double top = luma(y0, x0) + fx * (luma(y0, x1) - luma(y0, x0));
      const double bottom = luma(y1, x0) + fx * (luma(y1, x1) - luma(y1, x0));
      v(ty * kThumbnailSide + tx) = top + fy * (bottom - top);
    }
  }
  v.array() -= v.mean();
  const double norm = v.norm();
  // Interpolating a constant plane can leave rounding residue around 1e-13.
  if (!(norm > 1e-9)) {
    v.setZero();
    v(0) = 1.0;
  } else {
    v /= norm;
  }
  return v.template cast<Scalar>();
}

// ---------------------------------------------------------------- codec

/// APDS layout (little-endian): "APDS", u32 version = 1, u32 dim, u64 count,
/// then count*dim float32 row-major.
std::vector<std::uint8_t> encode_descriptors(const Descriptors& set);
/// Parses APDS bytes; `ids` come from the sidecar. Errors name the bad field.
Descriptors decode_descriptors(std::span<const std::uint8_t> bytes, std::vector<std::string> ids);

/// Sidecar id file next to a descriptor file: `<path>.ids`, one id per line.
std::filesystem::path ids_sidecar(const std::filesystem::path& path);

void write_descriptors(const Descriptors& set, const std::filesystem::path& path);
Descriptors read_descriptors(const std::filesystem::path& path);

}  // namespace patternforge

namespace patternforge {

struct ImageRef {
  std::string id;
  std::filesystem::path path;
};

/// Thumbnail descriptors for a list of images, rows in input order.
Descriptors describe_images(std::span<const ImageRef> images, std::size_t workers = 1);

}  // namespace patternforge
