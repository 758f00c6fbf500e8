#pragma once

#include <string_view>

#include "patternforge/image.hpp"
#include "patternforge/patterns.hpp"
#include "patternforge/rng.hpp"

namespace patternforge::detail {

class PatternContext {
 public:
  PatternContext(const PatternInstance& instance, const PartnerSource* partners)
      : instance_(instance), partners_(partners) {}

  double real(std::string_view name) const { return instance_.param(name); }
  int integer(std::string_view name) const { return static_cast<int>(instance_.param(name)); }

  /// Stream for pixel-level randomness, separate from parameter sampling.
  SplitMix64 pixel_rng() const { return SplitMix64(instance_.seed).split("pixels"); }

  /// Partner image picked by the instance's "partner" parameter in [0, 1).
  Image partner(const Image& self) const;

 private:
  const PatternInstance& instance_;
  const PartnerSource* partners_;
};

using PatternFn = Image (*)(const Image&, const PatternContext&);

// geometric
Image resize_crop(const Image&, const PatternContext&);
Image rotate(const Image&, const PatternContext&);
Image padding(const Image&, const PatternContext&);
Image vert_flip(const Image&, const PatternContext&);
Image hori_flip(const Image&, const PatternContext&);
Image persp_change(const Image&, const PatternContext&);
Image skew(const Image&, const PatternContext&);
Image shuf_pixels(const Image&, const PatternContext&);
Image grid_distort(const Image&, const PatternContext&);
Image swirl(const Image&, const PatternContext&);

// photometric
Image gray_scale(const Image&, const PatternContext&);
Image color_jitter(const Image&, const PatternContext&);
Image blur(const Image&, const PatternContext&);
Image pixelate(const Image&, const PatternContext&);
Image add_noise(const Image&, const PatternContext&);
Image change_chan(const Image&, const PatternContext&);
Image enc_quality(const Image&, const PatternContext&);
Image sharpen(const Image&, const PatternContext&);
Image solarize(const Image&, const PatternContext&);
Image posterize(const Image&, const PatternContext&);
Image gamma(const Image&, const PatternContext&);
Image mosaic(const Image&, const PatternContext&);
Image voronoi(const Image&, const PatternContext&);
Image wave_block(const Image&, const PatternContext&);
Image oil_paint(const Image&, const PatternContext&);

// overlay
Image add_stripes(const Image&, const PatternContext&);
Image add_shapes(const Image&, const PatternContext&);
Image erasing(const Image&, const PatternContext&);

// composite
Image blend(const Image&, const PatternContext&);
Image stack_image(const Image&, const PatternContext&);
Image repeat(const Image&, const PatternContext&);
Image cut_assemble(const Image&, const PatternContext&);
Image cut_paste(const Image&, const PatternContext&);
Image pyramid(const Image&, const PatternContext&);

/// Rounds a fraction of `extent` to a pixel count in [1, extent].
int fraction_to_pixels(double fraction, int extent);

}  // namespace patternforge::detail
