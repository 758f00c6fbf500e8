#include <algorithm>
#include <cmath>
#include <string>

#include "pattern_impl.hpp"
#include "patternforge/errors.hpp"
#include "patternforge/patterns.hpp"

namespace patternforge {

namespace {

using Kind = ParamSpec::Kind;

ParamSpec real(std::string name, double lo, double hi) { return {std::move(name), Kind::real, lo, hi}; }
ParamSpec integer(std::string name, double lo, double hi) {
  return {std::move(name), Kind::integer, lo, hi};
}

struct Entry {
  PatternDescriptor descriptor;
  detail::PatternFn fn;
};

std::vector<Entry> build_catalog() {
  using C = Category;
  using S = Split;
  namespace d = detail;
  std::vector<Entry> e;
  auto add = [&](std::string id, C category, S split, std::vector<ParamSpec> params,
                 std::string summary, d::PatternFn fn) {
    e.push_back({{std::move(id), category, split, std::move(params), std::move(summary)}, fn});
  };

  // -------- base
  add("ResizeCrop", C::geometric, S::base,
      {real("scale", 0.4, 0.95), real("cx", 0, 1), real("cy", 0, 1)},
      "crop a random window and resize it back to the input size", d::resize_crop);
  add("Blend", C::composite, S::base,
      {real("alpha", 0.2, 0.6), real("partner", 0, 1), real("zoom", 1.0, 1.5), real("pan_x", 0, 1),
       real("pan_y", 0, 1)},
      "alpha-blend with a partner image", d::blend);
  add("GrayScale", C::photometric, S::base, {}, "BT.601 luma on all channels", d::gray_scale);
  add("ColorJitter", C::photometric, S::base,
      {real("brightness", 0.6, 1.4), real("contrast", 0.6, 1.4), real("saturation", 0.5, 1.5),
       real("hue", -0.1, 0.1)},
      "random brightness, contrast, saturation and hue", d::color_jitter);
  add("Blur", C::photometric, S::base, {real("sigma_x", 0.6, 3.0), real("sigma_y", 0.6, 3.0)},
      "Gaussian blur", d::blur);
  add("Pixelate", C::photometric, S::base,
      {integer("block", 4, 32), real("extent", 0.3, 1.0), real("cx", 0, 1), real("cy", 0, 1)},
      "pixelate a random region", d::pixelate);
  add("Rotate", C::geometric, S::base, {real("angle", -45, 45)},
      "rotate about the centre, black fill", d::rotate);
  add("Padding", C::geometric, S::base,
      {real("left", 0, 0.3), real("top", 0, 0.3), real("right", 0, 0.3), real("bottom", 0, 0.3),
       integer("r", 0, 255), integer("g", 0, 255), integer("b", 0, 255)},
      "pad each side with a random colour", d::padding);
  add("AddNoise", C::photometric, S::base, {real("sigma", 4, 40)}, "additive Gaussian noise",
      d::add_noise);
  add("VertFlip", C::geometric, S::base, {}, "flip top to bottom", d::vert_flip);
  add("HoriFlip", C::geometric, S::base, {}, "flip left to right", d::hori_flip);
  add("PerspChange", C::geometric, S::base,
      {real("d0x", -0.15, 0.15), real("d0y", -0.15, 0.15), real("d1x", -0.15, 0.15),
       real("d1y", -0.15, 0.15), real("d2x", -0.15, 0.15), real("d2y", -0.15, 0.15),
       real("d3x", -0.15, 0.15), real("d3y", -0.15, 0.15)},
      "random perspective warp from corner displacements", d::persp_change);
  add("StackImage", C::composite, S::base,
      {real("partner", 0, 1), integer("axis", 0, 1), integer("partner_first", 0, 1),
       real("extent", 0.5, 1.0), real("zoom", 1.0, 1.5), real("pan_x", 0, 1), real("pan_y", 0, 1)},
      "stack a partner image along width or height", d::stack_image);
  add("ChangeChan", C::photometric, S::base,
      {integer("perm", 0, 5), integer("invert_mask", 0, 7), integer("shift_channel", 0, 2),
       real("shift_x", -0.1, 0.1), real("shift_y", -0.1, 0.1)},
      "shift, swap and invert colour channels", d::change_chan);
  add("EncQuality", C::photometric, S::base,
      {real("quality", 10, 70), integer("subsample", 0, 1), integer("offset_x", 0, 7),
       integer("offset_y", 0, 7)},
      "JPEG re-encode at reduced quality", d::enc_quality);
  add("AddStripes", C::overlay, S::base,
      {integer("count", 2, 10), real("width", 0.01, 0.08), integer("axis", 0, 1),
       real("offset", 0, 1), real("opacity", 0.5, 1.0)},
      "overlay coloured stripes", d::add_stripes);
  add("Sharpen", C::photometric, S::base, {real("amount", 0.5, 3.0), real("sigma", 0.5, 2.0)},
      "unsharp-mask edge enhancement", d::sharpen);
  add("Skew", C::geometric, S::base, {real("angle", -30, 30), integer("axis", 0, 1)},
      "shear along one axis", d::skew);
  add("ShufPixels", C::geometric, S::base, {real("fraction", 0.05, 0.3)},
      "shuffle a random subset of pixels", d::shuf_pixels);
  add("AddShapes", C::overlay, S::base, {integer("count", 1, 5), real("size", 0.1, 0.4)},
      "draw ellipses, rectangles, triangles, stars and pentagons", d::add_shapes);
  add("Repeat", C::composite, S::base,
      {real("tile", 0.25, 0.75), real("phase_x", 0, 1), real("phase_y", 0, 1)},
      "tile a shrunken copy across the canvas", d::repeat);
  add("CutAssemble", C::composite, S::base,
      {integer("cols", 2, 4), integer("rows", 2, 4), real("jitter", 0, 0.3)},
      "cut into cells and shuffle them", d::cut_assemble);
  add("CutPaste", C::composite, S::base,
      {real("size", 0.1, 0.4), real("ax", 0, 1), real("ay", 0, 1), real("bx", 0, 1),
       real("by", 0, 1)},
      "swap two rectangles", d::cut_paste);
  add("Solarize", C::photometric, S::base,
      {integer("threshold_r", 64, 224), integer("threshold_g", 64, 224),
       integer("threshold_b", 64, 224)},
      "invert samples at or above a per-channel threshold", d::solarize);
  add("Posterize", C::photometric, S::base,
      {integer("levels_r", 2, 64), integer("levels_g", 2, 64), integer("levels_b", 2, 64)},
      "quantize each channel to fewer levels", d::posterize);
  add("Gamma", C::photometric, S::base, {real("gamma", 0.4, 2.5), real("gain", 0.8, 1.2)},
      "power-law intensity mapping", d::gamma);
  add("Erasing", C::overlay, S::base,
      {real("area", 0.05, 0.3), real("aspect", 0.5, 2.0), real("cx", 0, 1), real("cy", 0, 1),
       integer("r", 0, 255), integer("g", 0, 255), integer("b", 0, 255)},
      "fill a random rectangle with a flat colour", d::erasing);
  add("GridDistort", C::geometric, S::base, {integer("steps", 3, 8), real("limit", 0.1, 0.4)},
      "piecewise-linear distortion of grid lines", d::grid_distort);

  // -------- novel
  add("Mosaic", C::photometric, S::novel,
      {integer("tile", 6, 24), real("extent", 0.4, 1.0), real("cx", 0, 1), real("cy", 0, 1)},
      "tile mosaic with grout lines over a region", d::mosaic);
  add("Voronoi", C::photometric, S::novel, {integer("sites", 16, 128)},
      "flatten each Voronoi cell to its mean colour", d::voronoi);
  add("Pyramid", C::composite, S::novel,
      {integer("levels", 2, 4), real("ratio", 0.5, 0.8), real("anchor_x", 0.3, 0.7),
       real("anchor_y", 0.3, 0.7)},
      "nest shrinking copies into a pyramid", d::pyramid);
  add("Swirl", C::geometric, S::novel,
      {real("strength", 1, 5), real("radius", 0.3, 0.9), real("cx", 0.3, 0.7), real("cy", 0.3, 0.7)},
      "radial swirl warp", d::swirl);
  add("WaveBlock", C::photometric, S::novel,
      {real("band", 0.2, 0.5), real("position", 0, 1), real("factor", 1.3, 2.5),
       integer("axis", 0, 1)},
      "amplify everything outside a random band", d::wave_block);
  add("OilPaint", C::photometric, S::novel,
      {integer("radius", 1, 4), real("levels", 6, 32), real("phase", 0, 1)},
      "oil-painting filter (modal intensity bin)", d::oil_paint);
  return e;
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    auto t = build_catalog();
    PatternSet base;
    PatternSet novel;
    for (const auto& entry : t) {
      auto& bucket = entry.descriptor.split == Split::base ? base : novel;
      if (!bucket.insert(entry.descriptor.id).second) {
        throw CatalogError("duplicate pattern id " + entry.descriptor.id);
      }
    }
    for (const auto& id : novel) {
      if (base.contains(id)) throw CatalogError("pattern in both splits: " + id);
    }
    return t;
  }();
  return table;
}

const std::vector<PatternDescriptor>& descriptors() {
  static const std::vector<PatternDescriptor> list = [] {
    std::vector<PatternDescriptor> out;
    for (const auto& e : entries()) out.push_back(e.descriptor);
    return out;
  }();
  return list;
}

const Entry& find_entry(std::string_view id) {
  for (const auto& e : entries()) {
    if (e.descriptor.id == id) return e;
  }
  throw CatalogError("unknown pattern: " + std::string(id));
}

}  // namespace

std::string_view to_string(Category category) noexcept {
  switch (category) {
    case Category::geometric: return "geometric";
    case Category::photometric: return "photometric";
    case Category::overlay: return "overlay";
    case Category::composite: return "composite";
  }
  return "?";
}

std::string_view to_string(Split split) noexcept {
  return split == Split::base ? "base" : "novel";
}

Split parse_split(std::string_view text) {
  if (text == "base") return Split::base;
  if (text == "novel") return Split::novel;
  throw ConfigError("unknown pattern split: " + std::string(text));
}

Category parse_category(std::string_view text) {
  for (auto c : {Category::geometric, Category::photometric, Category::overlay, Category::composite}) {
    if (to_string(c) == text) return c;
  }
  throw ConfigError("unknown pattern category: " + std::string(text));
}

double PatternInstance::param(std::string_view name) const {
  auto it = params.find(name);
  if (it == params.end()) {
    throw PatternError(pattern_id + ": missing parameter " + std::string(name));
  }
  return it->second;
}

std::string combo_key(const PatternSet& patterns) {
  std::string key;
  for (const auto& id : patterns) {
    if (!key.empty()) key += '+';
    key += id;
  }
  return key;
}

PatternSet pattern_set(const PatternCombo& combo) {
  PatternSet set;
  for (const auto& inst : combo.instances) set.insert(inst.pattern_id);
  return set;
}

std::string combo_key(const PatternCombo& combo) { return combo_key(pattern_set(combo)); }

PatternSet parse_combo_key(std::string_view key) {
  PatternSet set;
  std::size_t start = 0;
  while (start < key.size()) {
    auto end = key.find('+', start);
    if (end == std::string_view::npos) end = key.size();
    if (end > start) set.emplace(key.substr(start, end - start));
    start = end + 1;
  }
  return set;
}

std::span<const PatternDescriptor> catalog() { return descriptors(); }

const PatternDescriptor& find_pattern(std::string_view id) { return find_entry(id).descriptor; }

std::vector<std::string> pattern_ids(Split split) {
  std::vector<std::string> ids;
  for (const auto& d : descriptors()) {
    if (d.split == split) ids.push_back(d.id);
  }
  return ids;
}

PatternInstance sample_instance(std::string_view pattern_id, std::uint64_t seed) {
  const auto& desc = find_pattern(pattern_id);
  SplitMix64 rng(seed);
  PatternInstance inst{desc.id, {}, seed};
  for (const auto& spec : desc.params) {
    const double v = spec.kind == Kind::integer
                         ? static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(spec.lo),
                                                               static_cast<std::int64_t>(spec.hi)))
                         : rng.uniform(spec.lo, spec.hi);
    inst.params.emplace(spec.name, v);
  }
  return inst;
}

void validate(const PatternInstance& instance) {
  const auto& desc = find_pattern(instance.pattern_id);
  if (instance.params.size() != desc.params.size()) {
    throw PatternError(instance.pattern_id + ": expected " + std::to_string(desc.params.size()) +
                       " parameters, got " + std::to_string(instance.params.size()));
  }
  for (const auto& spec : desc.params) {
    const double v = instance.param(spec.name);
    const bool in_range = spec.kind == Kind::integer
                              ? (v >= spec.lo && v <= spec.hi && v == std::floor(v))
                              : (v >= spec.lo && v <= spec.hi);
    if (!std::isfinite(v) || !in_range) {
      throw PatternError(instance.pattern_id + ": parameter " + spec.name + "=" +
                         std::to_string(v) + " outside schema");
    }
  }
}

Image apply(const Image& image, const PatternInstance& instance, const PartnerSource* partners) {
  const auto& entry = find_entry(instance.pattern_id);
  if (!image.valid()) throw PatternError(instance.pattern_id + ": input image is empty");
  validate(instance);
  detail::PatternContext ctx(instance, partners);
  Image out = entry.fn(image, ctx);
  if (!out.valid()) throw PatternError(instance.pattern_id + ": degenerate output image");
  return out;
}

Image apply_combo(const Image& image, const PatternCombo& combo, const PartnerSource* partners) {
  if (combo.empty()) throw PatternError("apply_combo: empty combo");
  Image current = image;
  for (const auto& inst : combo.instances) current = apply(current, inst, partners);
  return current;
}

nlohmann::json to_json(const PatternInstance& instance) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, value] : instance.params) {
    if (std::trunc(value) == value && std::abs(value) < 9.0e15) {
      params[name] = static_cast<std::int64_t>(value);
    } else {
      params[name] = value;
    }
  }
  return {{"pattern", instance.pattern_id}, {"seed", instance.seed}, {"params", params}};
}

nlohmann::json to_json(const PatternCombo& combo) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& inst : combo.instances) arr.push_back(to_json(inst));
  return arr;
}

PatternInstance instance_from_json(const nlohmann::json& j) {
  try {
    PatternInstance inst;
    inst.pattern_id = j.at("pattern").get<std::string>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [name, value] : j.at("params").items()) inst.params[name] = value.get<double>();
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed pattern instance: ") + e.what());
  }
}

PatternCombo combo_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("combo must be a JSON array");
  PatternCombo combo;
  for (const auto& item : j) combo.instances.push_back(instance_from_json(item));
  return combo;
}

nlohmann::json catalog_json() {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& d : descriptors()) {
    nlohmann::json schema = nlohmann::json::array();
    for (const auto& p : d.params) {
      schema.push_back({{"name", p.name},
                        {"kind", p.kind == Kind::integer ? "integer" : "real"},
                        {"min", p.lo},
                        {"max", p.hi}});
    }
    arr.push_back({{"id", d.id},
                   {"category", to_string(d.category)},
                   {"split", to_string(d.split)},
                   {"summary", d.summary},
                   {"param_schema", schema}});
  }
  return arr;
}

namespace detail {

int fraction_to_pixels(double fraction, int extent) {
  return std::clamp(static_cast<int>(std::lround(fraction * extent)), 1, extent);
}

Image PatternContext::partner(const Image& self) const {
  const double pick = real("partner");
  if (partners_ != nullptr && partners_->size() > 0) {
    const auto n = partners_->size();
    const auto index = std::min(n - 1, static_cast<std::size_t>(pick * static_cast<double>(n)));
    return partners_->fetch(index);
  }
  Image out(self.width(), self.height());
  for (int y = 0; y < self.height(); ++y) {
    for (int x = 0; x < self.width(); ++x) {
      const Rgb c = self.get(self.width() - 1 - x, self.height() - 1 - y);
      out.set(x, y, {c.b, c.g, c.r});
    }
  }
  return out;
}

}  // namespace detail

}  // namespace patternforge
