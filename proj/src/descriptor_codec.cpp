#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "patternforge/descriptors.hpp"

namespace patternforge {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'A', 'P', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 4 + 4 + 4 + 8;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[offset + i]) << (8 * i);
  return value;
}

}  // namespace

std::vector<std::uint8_t> encode_descriptors(const Descriptors& set) {
  if (set.dim() <= 0) throw CodecError("dim: must be positive");
  if (static_cast<Eigen::Index>(set.ids.size()) != set.size()) throw CodecError("ids: count does not match rows");
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + static_cast<std::size_t>(set.vectors.size()) * 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.dim()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(set.size()));
  for (Eigen::Index r = 0; r < set.size(); ++r) {
    for (Eigen::Index c = 0; c < set.dim(); ++c) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(set.vectors(r, c)));
  }
  return out;
}

Descriptors decode_descriptors(std::span<const std::uint8_t> bytes, std::vector<std::string> ids) {
  if (bytes.size() < 4) throw CodecError("magic: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw CodecError("magic: expected APDS");
  if (bytes.size() < 8) throw CodecError("version: truncated header");
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kVersion) throw CodecError("version: unsupported version " + std::to_string(version));
  if (bytes.size() < 12) throw CodecError("dim: truncated header");
  const auto dim = get_le<std::uint32_t>(bytes, 8);
  if (dim == 0) throw CodecError("dim: must be positive");
  if (bytes.size() < kHeaderSize) throw CodecError("count: truncated header");
  const auto count = get_le<std::uint64_t>(bytes, 12);

  const std::size_t payload = bytes.size() - kHeaderSize;
  if (count > payload / 4 / dim) {
    throw CodecError("vectors: truncated (expected " + std::to_string(count) + " rows of dim " + std::to_string(dim) +
                     ", file holds " + std::to_string(payload) + " payload bytes)");
  }
  if (payload != count * dim * 4) throw CodecError("vectors: trailing bytes after payload");
  if (ids.size() != count) {
    throw CodecError("ids: sidecar has " + std::to_string(ids.size()) + " ids, header count is " + std::to_string(count));
  }

  Descriptors set;
  set.ids = std::move(ids);
  set.vectors.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  std::size_t offset = kHeaderSize;
  for (Eigen::Index r = 0; r < set.size(); ++r) {
    for (Eigen::Index c = 0; c < set.dim(); ++c, offset += 4) {
      set.vectors(r, c) = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
    }
  }
  try {
    validate(set);
  } catch (const Error& e) {
    throw CodecError(std::string("vectors: ") + e.what());
  }
  return set;
}

fs::path ids_sidecar(const fs::path& path) { return fs::path(path.string() + ".ids"); }

void write_descriptors(const Descriptors& set, const fs::path& path) {
  const auto bytes = encode_descriptors(set);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CodecError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  std::ofstream ids(ids_sidecar(path), std::ios::binary | std::ios::trunc);
  if (!ids) throw CodecError("cannot write " + ids_sidecar(path).string());
  for (const auto& id : set.ids) {
    if (id.find_first_of("\r\n") != std::string::npos) throw CodecError("ids: id contains a line break");
    ids << id << '\n';
  }
}

Descriptors read_descriptors(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CodecError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::ifstream sidecar(ids_sidecar(path));
  if (!sidecar) throw CodecError("ids: missing sidecar " + ids_sidecar(path).string());
  std::vector<std::string> ids;
  for (std::string line; std::getline(sidecar, line);) ids.push_back(line);
  return decode_descriptors(bytes, std::move(ids));
}

}  // namespace patternforge
