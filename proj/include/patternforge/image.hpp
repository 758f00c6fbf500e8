#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace patternforge {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit RGB raster. A default-constructed Image is empty (0x0);
/// every other Image has width, height >= 1 and exactly width*height*3 samples.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int width, int height, Rgb fill = {});
  Image(int width, int height, std::vector<std::uint8_t> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  std::span<std::uint8_t> samples() noexcept { return data_; }
  std::span<const std::uint8_t> samples() const noexcept { return data_; }

  std::uint8_t* pixel(int x, int y) noexcept {
    return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * kChannels;
  }
  const std::uint8_t* pixel(int x, int y) const noexcept {
    return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * kChannels;
  }

  void set(int x, int y, Rgb c) noexcept {
    auto* p = pixel(x, y);
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
  Rgb get(int x, int y) const noexcept {
    const auto* p = pixel(x, y);
    return {p[0], p[1], p[2]};
  }

  /// Checks the raster invariants (dimensions >= 1, sample count).
  bool valid() const noexcept;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

std::vector<std::uint8_t> encode_png(const Image& image);
Image decode_png(std::span<const std::uint8_t> bytes);

struct JpegOptions {
  /// libjpeg-style quality in [1, 100]; fractional values scale the standard
  /// quantization tables continuously.
  double quality = 75.0;
  bool subsample_chroma = true;
};
std::vector<std::uint8_t> encode_jpeg(const Image& image, const JpegOptions& options);
Image decode_jpeg(std::span<const std::uint8_t> bytes);

/// Reads a PNG or JPEG file (format chosen by magic bytes).
Image read_image(const std::filesystem::path& path);
/// Writes a lossless PNG. Output bytes depend only on the pixels.
void write_png(const Image& image, const std::filesystem::path& path);

}  // namespace patternforge
