#include "patternforge/image.hpp"

#include <png.h>
#include <stdio.h>  // jpeglib.h needs FILE
#include <jpeglib.h>

#include <algorithm>
#include <array>
#include <csetjmp>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "patternforge/errors.hpp"

namespace patternforge {

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw PatternError("image dimensions must be >= 1, got " + std::to_string(width) + "x" +
                       std::to_string(height));
  }
  data_.resize(pixel_count() * kChannels);
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    data_[3 * i] = fill.r;
    data_[3 * i + 1] = fill.g;
    data_[3 * i + 2] = fill.b;
  }
}

Image::Image(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), data_(std::move(samples)) {
  if (width < 1 || height < 1 || data_.size() != pixel_count() * kChannels) {
    throw PatternError("sample buffer does not match " + std::to_string(width) + "x" +
                       std::to_string(height) + "x3");
  }
}

bool Image::valid() const noexcept {
  return width_ >= 1 && height_ >= 1 && data_.size() == pixel_count() * kChannels;
}

// ---------------------------------------------------------------- PNG

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (!image.valid()) throw ImageIoError("cannot encode an empty image");
  png_image desc;
  std::memset(&desc, 0, sizeof desc);
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(image.width());
  desc.height = static_cast<png_uint_32>(image.height());
  desc.format = PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&desc, nullptr, &size, 0, image.samples().data(), 0, nullptr)) {
    throw ImageIoError(std::string("png encode: ") + desc.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0, image.samples().data(), 0,
                                 nullptr)) {
    throw ImageIoError(std::string("png encode: ") + desc.message);
  }
  out.resize(size);
  return out;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image desc;
  std::memset(&desc, 0, sizeof desc);
  desc.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&desc, bytes.data(), bytes.size())) {
    throw ImageIoError(std::string("png decode: ") + desc.message);
  }
  desc.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> samples(PNG_IMAGE_SIZE(desc));
  if (!png_image_finish_read(&desc, nullptr, samples.data(), 0, nullptr)) {
    png_image_free(&desc);
    throw ImageIoError(std::string("png decode: ") + desc.message);
  }
  return Image(static_cast<int>(desc.width), static_cast<int>(desc.height), std::move(samples));
}

// ---------------------------------------------------------------- JPEG

namespace {

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void on_jpeg_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Annex K tables, natural order.
constexpr std::array<unsigned int, 64> kLumaTable = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
constexpr std::array<unsigned int, 64> kChromaTable = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99,
    99, 99, 47, 66, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

std::array<unsigned int, 64> scaled_table(const std::array<unsigned int, 64>& base,
                                          double quality) {
  quality = std::clamp(quality, 1.0, 100.0);
  const double percent = quality < 50.0 ? 5000.0 / quality : 200.0 - 2.0 * quality;
  std::array<unsigned int, 64> out{};
  for (std::size_t i = 0; i < 64; ++i) {
    const double v = std::floor((base[i] * percent + 50.0) / 100.0);
    out[i] = static_cast<unsigned int>(std::clamp(v, 1.0, 255.0));
  }
  return out;
}

// Kept free of C++ objects with destructors: longjmp skips them.
bool jpeg_encode_raw(const std::uint8_t* rgb, int width, int height,
                     const unsigned int* luma, const unsigned int* chroma, bool subsample,
                     unsigned char** out, unsigned long* out_size, char* message) {
  jpeg_compress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = on_jpeg_error;
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, out, out_size);
  cinfo.image_width = static_cast<JDIMENSION>(width);
  cinfo.image_height = static_cast<JDIMENSION>(height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_add_quant_table(&cinfo, 0, luma, 100, TRUE);
  jpeg_add_quant_table(&cinfo, 1, chroma, 100, TRUE);
  const int h = subsample ? 2 : 1;
  cinfo.comp_info[0].h_samp_factor = h;
  cinfo.comp_info[0].v_samp_factor = h;
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(rgb + static_cast<std::size_t>(cinfo.next_scanline) *
                                                  static_cast<std::size_t>(width) * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

bool jpeg_decode_raw(const std::uint8_t* bytes, std::size_t size, std::uint8_t** out_rgb,
                     int* width, int* height, char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  std::uint8_t* buffer = nullptr;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = on_jpeg_error;
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    std::free(buffer);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes, static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_decompress(&cinfo);
  if (cinfo.output_components != 3) {
    std::strncpy(message, "unsupported JPEG colour layout", JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
  buffer = static_cast<std::uint8_t*>(std::malloc(stride * cinfo.output_height));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = buffer + static_cast<std::size_t>(cinfo.output_scanline) * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  *width = static_cast<int>(cinfo.output_width);
  *height = static_cast<int>(cinfo.output_height);
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  *out_rgb = buffer;
  return true;
}

}  // namespace

std::vector<std::uint8_t> encode_jpeg(const Image& image, const JpegOptions& options) {
  if (!image.valid()) throw ImageIoError("cannot encode an empty image");
  const auto luma = scaled_table(kLumaTable, options.quality);
  const auto chroma = scaled_table(kChromaTable, options.quality);
  unsigned char* out = nullptr;
  unsigned long out_size = 0;
  char message[JMSG_LENGTH_MAX] = {};
  const bool ok = jpeg_encode_raw(image.samples().data(), image.width(), image.height(),
                                  luma.data(), chroma.data(), options.subsample_chroma, &out,
                                  &out_size, message);
  if (!ok) {
    std::free(out);
    throw ImageIoError(std::string("jpeg encode: ") + message);
  }
  std::vector<std::uint8_t> bytes(out, out + out_size);
  std::free(out);
  return bytes;
}

Image decode_jpeg(std::span<const std::uint8_t> bytes) {
  std::uint8_t* rgb = nullptr;
  int width = 0;
  int height = 0;
  char message[JMSG_LENGTH_MAX] = {};
  if (!jpeg_decode_raw(bytes.data(), bytes.size(), &rgb, &width, &height, message)) {
    throw ImageIoError(std::string("jpeg decode: ") + message);
  }
  std::vector<std::uint8_t> samples(rgb, rgb + static_cast<std::size_t>(width) * height * 3);
  std::free(rgb);
  return Image(width, height, std::move(samples));
}

// ---------------------------------------------------------------- files

Image read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return decode_png(bytes);
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return decode_jpeg(bytes);
  }
  throw ImageIoError("unrecognised image format: " + path.string());
}

void write_png(const Image& image, const std::filesystem::path& path) {
  const auto bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ImageIoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageIoError("short write to " + path.string());
}

}  // namespace patternforge
