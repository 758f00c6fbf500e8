#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "patternforge/image.hpp"

namespace patternforge {

enum class Category { geometric, photometric, overlay, composite };
enum class Split { base, novel };

std::string_view to_string(Category category) noexcept;
std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view text);
Category parse_category(std::string_view text);

struct ParamSpec {
  enum class Kind { real, integer };
  std::string name;
  Kind kind = Kind::real;
  double lo = 0.0;
  double hi = 0.0;  // reals are drawn from [lo, hi), integers from [lo, hi]
};

struct PatternDescriptor {
  std::string id;
  Category category = Category::photometric;
  Split split = Split::base;
  std::vector<ParamSpec> params;
  std::string summary;

  bool parameterized() const noexcept { return !params.empty(); }
};

using ParamMap = std::map<std::string, double, std::less<>>;

/// A fully parameterized tamper transformation. `seed` also drives any
/// pixel-level randomness (noise, shape placement, shuffles).
struct PatternInstance {
  std::string pattern_id;
  ParamMap params;
  std::uint64_t seed = 0;

  double param(std::string_view name) const;
  friend bool operator==(const PatternInstance&, const PatternInstance&) = default;
};

/// Ordered patterns; applied left to right.
struct PatternCombo {
  std::vector<PatternInstance> instances;

  bool empty() const noexcept { return instances.empty(); }
  std::size_t size() const noexcept { return instances.size(); }
  friend bool operator==(const PatternCombo&, const PatternCombo&) = default;
};

using PatternSet = std::set<std::string, std::less<>>;

/// Sorted pattern-id set joined with '+'; order-insensitive identity of a combo.
std::string combo_key(const PatternCombo& combo);
std::string combo_key(const PatternSet& patterns);
PatternSet parse_combo_key(std::string_view key);
PatternSet pattern_set(const PatternCombo& combo);

/// Secondary images for patterns that mix two pictures (Blend, StackImage).
/// Implementations must be safe to call concurrently.
class PartnerSource {
 public:
  virtual ~PartnerSource() = default;
  virtual std::size_t size() const = 0;
  virtual Image fetch(std::size_t index) const = 0;
};

/// The full catalog in stable order: 28 base patterns then 6 novel ones.
std::span<const PatternDescriptor> catalog();
const PatternDescriptor& find_pattern(std::string_view id);
std::vector<std::string> pattern_ids(Split split);

PatternInstance sample_instance(std::string_view pattern_id, std::uint64_t seed);
/// Throws CatalogError / PatternError if the instance does not match its schema.
void validate(const PatternInstance& instance);

/// Applies one pattern. Without partners, two-image patterns pair the input
/// with its own 180-degree rotation with reversed channel order.
Image apply(const Image& image, const PatternInstance& instance,
            const PartnerSource* partners = nullptr);
Image apply_combo(const Image& image, const PatternCombo& combo,
                  const PartnerSource* partners = nullptr);

nlohmann::json to_json(const PatternInstance& instance);
nlohmann::json to_json(const PatternCombo& combo);
PatternInstance instance_from_json(const nlohmann::json& j);
PatternCombo combo_from_json(const nlohmann::json& j);
nlohmann::json catalog_json();

}  // namespace patternforge
