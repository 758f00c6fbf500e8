#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "patternforge/image.hpp"
#include "patternforge/manifest.hpp"

namespace patternforge::tools {

/// Seeded test picture: two-colour gradient plus a handful of discs, boxes
/// and bars. Different indices give visually unrelated images.
Image synthetic_image(std::uint64_t seed, std::size_t index, int width = 96, int height = 96);

/// Writes `<prefix>NNNNN.png` for count images into dir and returns the entries.
std::vector<SourceEntry> write_synthetic_sources(const std::filesystem::path& dir, std::size_t count,
                                                 std::uint64_t seed, const std::string& prefix = "s",
                                                 int width = 96, int height = 96);

}  // namespace patternforge::tools
