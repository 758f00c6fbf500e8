#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace patternforge {

/// SplitMix64 output finalizer applied to (z + golden gamma). A bijection on
/// 64-bit words, so distinct inputs never collide.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// 64-bit FNV-1a over the bytes of `text`.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Stable seed for one (entity, index) under a global seed. Independent of
/// scheduling; for a fixed (global_seed, entity_id) the map index -> seed is
/// injective.
constexpr std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view entity_id,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(mix64(global_seed) ^ fnv1a64(entity_id)) ^ index);
}

/// The one pseudorandom generator used for all sampling (SplitMix64).
/// Every derived quantity (uniform reals, bounded integers, normals, shuffles)
/// is computed here with fixed arithmetic so streams are identical on every
/// platform, unlike the std:: distributions.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] (inclusive), unbiased by rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;

  /// Standard normal via Box-Muller (one draw per call, no cached spare).
  double normal() noexcept;

  /// Independent child stream keyed by a label; does not advance this one.
  SplitMix64 split(std::string_view stream) const noexcept {
    return SplitMix64(mix64(state_ ^ fnv1a64(stream)));
  }

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace patternforge
