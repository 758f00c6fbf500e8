#include "patternforge/selection.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <utility>

#include "patternforge/errors.hpp"
#include "patternforge/matches.hpp"
#include "patternforge/rng.hpp"

namespace patternforge {

namespace {

constexpr std::array kModes{
    std::pair{SelectionMode::random, std::string_view{"random"}},
    std::pair{SelectionMode::feature, std::string_view{"feature"}},
    std::pair{SelectionMode::ground_truth, std::string_view{"ground_truth"}},
    std::pair{SelectionMode::wrong, std::string_view{"wrong"}},
    std::pair{SelectionMode::self_upper, std::string_view{"self_upper"}},
    std::pair{SelectionMode::zero_shot, std::string_view{"zero_shot"}},
};

AssignedPair from_pool(const PromptPoolEntry& e) {
  return {e.pair_id, e.combo_key, e.original_id, e.original_path, e.replica_id, e.replica_path};
}

std::size_t overlap(const PatternSet& a, const PatternSet& b) {
  std::size_t n = 0;
  for (const auto& id : a) n += b.count(id);
  return n;
}

// Pool indices in a per-query seeded order.
std::vector<std::size_t> seeded_order(std::size_t size, std::uint64_t seed, std::string_view query_id) {
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(derive_seed(seed, query_id, 0));
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

Eigen::Index pool_row(const Descriptors& features, const PromptPoolEntry& e) {
  Eigen::Index row = features.find(e.pair_id);
  if (row < 0) row = features.find(e.replica_id);
  if (row < 0) throw ConfigError("no pool pattern feature for pair " + e.pair_id);
  return row;
}

}  // namespace

std::string_view to_string(SelectionMode mode) noexcept {
  for (const auto& [m, name] : kModes) {
    if (m == mode) return name;
  }
  return "unknown";
}

SelectionMode parse_selection_mode(std::string_view text) {
  for (const auto& [m, name] : kModes) {
    if (name == text) return m;
  }
  throw ConfigError("unknown selection mode '" + std::string(text) + "'");
}

void write_assignment(const std::filesystem::path& path, const PromptAssignment& assignment) {
  std::vector<nlohmann::json> rows;
  rows.reserve(assignment.pairs.size());
  for (const auto& [query_id, pairs] : assignment.pairs) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& p : pairs) {
      list.push_back({{"pair_id", p.pair_id},
                      {"combo_key", p.combo_key},
                      {"original_id", p.original_id},
                      {"original_path", p.original_path},
                      {"replica_id", p.replica_id},
                      {"replica_path", p.replica_path}});
    }
    rows.push_back({{"query_id", query_id}, {"mode", to_string(assignment.mode)}, {"pairs", std::move(list)}});
  }
  write_jsonl(path, rows);
}

PromptAssignment read_assignment(const std::filesystem::path& path) {
  PromptAssignment out;
  bool first = true;
  for (const auto& row : read_jsonl(path)) {
    try {
      const auto mode = parse_selection_mode(row.at("mode").get<std::string>());
      if (first) out.mode = mode;
      else if (mode != out.mode) throw InputError("mixed selection modes in " + path.string());
      first = false;
      std::vector<AssignedPair> pairs;
      for (const auto& p : row.at("pairs")) {
        pairs.push_back({p.at("pair_id").get<std::string>(), p.at("combo_key").get<std::string>(),
                         p.at("original_id").get<std::string>(), p.at("original_path").get<std::string>(),
                         p.at("replica_id").get<std::string>(), p.at("replica_path").get<std::string>()});
      }
      const auto query_id = row.at("query_id").get<std::string>();
      if (!out.pairs.emplace(query_id, std::move(pairs)).second) {
        throw InputError("duplicate query " + query_id + " in " + path.string());
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  }
  return out;
}

PromptAssignment select_prompts(SelectionMode mode, const SelectionInputs& in) {
  const bool needs_gt =
      mode == SelectionMode::ground_truth || mode == SelectionMode::wrong || mode == SelectionMode::self_upper;
  if (needs_gt && in.ground_truth == nullptr) {
    throw ConfigError("mode " + std::string(to_string(mode)) + " needs the evaluation ground truth");
  }
  if (mode == SelectionMode::feature && (in.query_features == nullptr || in.pool_features == nullptr)) {
    throw ConfigError("mode feature needs query and pool pattern features");
  }
  const bool needs_pool = mode != SelectionMode::self_upper && mode != SelectionMode::zero_shot;
  if (needs_pool && in.pool.empty()) throw ConfigError("prompt pool is empty");
  if (needs_pool && in.n == 0) throw ConfigError("n must be >= 1");

  PromptAssignment out;
  out.mode = mode;
  const std::size_t take = std::min(in.n, in.pool.size());

  std::vector<PatternSet> pool_sets;
  pool_sets.reserve(in.pool.size());
  for (const auto& e : in.pool) pool_sets.push_back(parse_combo_key(e.combo_key));

  for (const auto& q : in.queries) {
    std::vector<AssignedPair> pairs;
    switch (mode) {
      case SelectionMode::zero_shot:
        break;
      case SelectionMode::self_upper:
        pairs.push_back({"self:" + q.id, combo_key(q.combo), q.source_id, q.source_path, q.id, q.path});
        break;
      case SelectionMode::random: {
        const auto order = seeded_order(in.pool.size(), in.seed, q.id);
        for (std::size_t i = 0; i < take; ++i) pairs.push_back(from_pool(in.pool[order[i]]));
        break;
      }
      case SelectionMode::feature: {
        const Eigen::Index qrow = in.query_features->find(q.id);
        if (qrow < 0) throw ConfigError("no query pattern feature for " + q.id);
        if (in.query_features->dim() != in.pool_features->dim()) {
          throw ShapeError("query and pool pattern features differ in dimension");
        }
        std::vector<Match> scored;
        scored.reserve(in.pool.size());
        std::map<std::string, std::size_t> by_pair;
        for (std::size_t i = 0; i < in.pool.size(); ++i) {
          const Eigen::Index prow = pool_row(*in.pool_features, in.pool[i]);
          scored.push_back({in.pool[i].pair_id, cosine_of_rows(in.query_features->vectors.row(qrow),
                                                               in.pool_features->vectors.row(prow))});
          by_pair[in.pool[i].pair_id] = i;
        }
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                          ranks_before);
        for (std::size_t i = 0; i < take; ++i) pairs.push_back(from_pool(in.pool[by_pair.at(scored[i].gallery_id)]));
        break;
      }
      case SelectionMode::ground_truth: {
        const PatternSet target = pattern_set(q.combo);
        const std::string key = combo_key(target);
        auto order = seeded_order(in.pool.size(), in.seed, q.id);
        // Exact key first, then larger overlap; seeded order within a tier.
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          const bool ea = in.pool[a].combo_key == key;
          const bool eb = in.pool[b].combo_key == key;
          if (ea != eb) return ea;
          return overlap(target, pool_sets[a]) > overlap(target, pool_sets[b]);
        });
        for (std::size_t i = 0; i < take; ++i) pairs.push_back(from_pool(in.pool[order[i]]));
        break;
      }
      case SelectionMode::wrong: {
        const PatternSet target = pattern_set(q.combo);
        for (std::size_t i : seeded_order(in.pool.size(), in.seed, q.id)) {
          if (pairs.size() == take) break;
          if (overlap(target, pool_sets[i]) == 0) pairs.push_back(from_pool(in.pool[i]));
        }
        if (pairs.empty()) throw SelectionError("no pool pair shares no pattern with query " + q.id);
        break;
      }
    }
    if (!out.pairs.emplace(q.id, std::move(pairs)).second) throw InputError("duplicate query id " + q.id);
  }
  return out;
}

}  // namespace patternforge
