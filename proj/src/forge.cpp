#include "patternforge/forge.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

#include "patternforge/errors.hpp"
#include "patternforge/image.hpp"
#include "patternforge/parallel.hpp"
#include "patternforge/rng.hpp"

namespace patternforge {

namespace fs = std::filesystem;

namespace {

std::string padded(std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, value);
  return buf;
}

int digits_for(std::size_t max_value, int minimum) {
  int d = 1;
  for (std::size_t v = max_value; v >= 10; v /= 10) ++d;
  return std::max(d, minimum);
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(seed);
  rng.shuffle(std::span(order));
  return order;
}

class SourcePartners final : public PartnerSource {
 public:
  explicit SourcePartners(const std::vector<SourceEntry>& sources) : sources_(sources) {}
  std::size_t size() const override { return sources_.size(); }
  // unreadable partners are skipped in index order
  Image fetch(std::size_t index) const override {
    for (std::size_t step = 0; step < sources_.size(); ++step) {
      try {
        return read_image(sources_.at((index + step) % sources_.size()).path);
      } catch (const ImageIoError&) {
      }
    }
    throw ImageIoError("no readable partner image");
  }

 private:
  const std::vector<SourceEntry>& sources_;
};

/// Collects per-record outcomes from worker threads.
class Collector {
 public:
  void add(ProvenanceRecord r) {
    std::lock_guard lock(mutex_);
    records_.push_back(std::move(r));
  }
  void fail(std::string id, std::string message) {
    std::lock_guard lock(mutex_);
    errors_.push_back({std::move(id), std::move(message)});
  }
  std::vector<ProvenanceRecord> take_records() {
    std::sort(records_.begin(), records_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return std::move(records_);
  }
  std::vector<RecordError> take_errors() {
    std::sort(errors_.begin(), errors_.end(),
              [](const auto& a, const auto& b) { return a.record_id < b.record_id; });
    return std::move(errors_);
  }

 private:
  std::mutex mutex_;
  std::vector<ProvenanceRecord> records_;
  std::vector<RecordError> errors_;
};

void check_combo_range(std::size_t available, int kmin, int kmax) {
  if (kmin < 1 || kmax > 3 || kmin > kmax) {
    throw ConfigError("combo size range must satisfy 1 <= kmin <= kmax <= 3, got [" + std::to_string(kmin) +
                      "," + std::to_string(kmax) + "]");
  }
  if (static_cast<std::size_t>(kmax) > available) {
    throw ConfigError("combo size " + std::to_string(kmax) + " exceeds the " + std::to_string(available) +
                      " available patterns");
  }
}

}  // namespace

void ForgeConfig::validate() const {
  if (noop_queries) return;
  check_combo_range(eligible_patterns(pattern_split, category).size(), kmin, kmax);
}

std::vector<std::string> eligible_patterns(Split split, std::optional<Category> category) {
  std::vector<std::string> ids;
  for (const auto& d : catalog()) {
    if (d.split == split && (!category || d.category == *category)) ids.push_back(d.id);
  }
  return ids;
}

PatternCombo sample_combo(std::span<const std::string> patterns, std::uint64_t seed, int kmin, int kmax) {
  if (patterns.empty()) throw ConfigError("sample_combo: empty pattern set");
  check_combo_range(patterns.size(), kmin, kmax);
  SplitMix64 rng(seed);
  const auto k = static_cast<std::size_t>(rng.uniform_int(kmin, kmax));
  std::vector<std::string> pool(patterns.begin(), patterns.end());
  // Partial Fisher-Yates: the first k slots are drawn without replacement, in draw order.
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size()) - 1));
    std::swap(pool[i], pool[j]);
  }
  PatternCombo combo;
  for (std::size_t i = 0; i < k; ++i) combo.instances.push_back(sample_instance(pool[i], rng.next()));
  return combo;
}

PatternCombo sample_combo(Split split, std::uint64_t seed, int kmin, int kmax) {
  const auto ids = pattern_ids(split);
  return sample_combo(ids, seed, kmin, kmax);
}

TrainingForgeResult forge_training_set(const std::vector<SourceEntry>& sources, const ForgeConfig& config,
                                       const fs::path& out_root) {
  if (config.pattern_split != Split::base) throw ConfigError("training sets use base patterns only");
  config.validate();
  const auto patterns = eligible_patterns(Split::base, config.category);
  fs::create_directories(out_root / "train");
  const int width = digits_for(config.replicas_per_original, 3);
  const SourcePartners partners(sources);
  Collector out;

  parallel_for(sources.size(), config.workers, [&](std::size_t i) {
    const auto& src = sources[i];
    auto record_id = [&](std::size_t r) { return src.id + "_" + padded(r, width); };
    Image image;
    try {
      image = read_image(src.path);
    } catch (const std::exception& e) {
      for (std::size_t r = 0; r <= config.replicas_per_original; ++r) out.fail(record_id(r), e.what());
      return;
    }
    for (std::size_t r = 0; r <= config.replicas_per_original; ++r) {
      ProvenanceRecord rec;
      rec.id = record_id(r);
      rec.source_id = src.id;
      rec.split = RecordSplit::train;
      rec.path = "train/" + rec.id + ".png";
      rec.source_path = src.path.string();
      try {
        if (r > 0) {
          rec.combo = sample_combo(patterns, derive_seed(config.global_seed, src.id, r), config.kmin, config.kmax);
        }
        const Image forged = rec.combo.empty() ? image : apply_combo(image, rec.combo, &partners);
        write_png(forged, out_root / rec.path);
        out.add(std::move(rec));
      } catch (const std::exception& e) {
        out.fail(rec.id, e.what());
      }
    }
  });

  TrainingForgeResult result{out.take_records(), out.take_errors()};
  write_records(out_root / "train.jsonl", result.records);
  write_errors(out_root / "errors.jsonl", result.errors);
  return result;
}

EvalForgeResult forge_eval_set(const std::vector<SourceEntry>& gallery_sources,
                               const std::vector<SourceEntry>& distractor_sources, const ForgeConfig& config,
                               const fs::path& out_root) {
  if (config.pattern_split != Split::novel) throw ConfigError("evaluation queries use novel patterns only");
  config.validate();
  if (config.n_true_queries > gallery_sources.size()) {
    throw ConfigError("n_true_queries (" + std::to_string(config.n_true_queries) + ") exceeds gallery size (" +
                      std::to_string(gallery_sources.size()) + ")");
  }
  if (config.n_distractor_queries > 0 && distractor_sources.empty()) {
    throw ConfigError("distractor queries requested but no distractor sources given");
  }
  std::set<std::string> gallery_ids;
  for (const auto& g : gallery_sources) gallery_ids.insert(g.id);
  for (const auto& d : distractor_sources) {
    if (gallery_ids.contains(d.id)) throw ConfigError("distractor source also in gallery: " + d.id);
  }

  const auto patterns = eligible_patterns(Split::novel, config.category);
  const std::size_t n_queries = config.n_true_queries + config.n_distractor_queries;
  const auto true_pick = seeded_permutation(gallery_sources.size(), derive_seed(config.global_seed, "eval:true", 0));
  const auto distractor_pick =
      seeded_permutation(distractor_sources.size(), derive_seed(config.global_seed, "eval:distractor", 0));
  const auto id_order = seeded_permutation(n_queries, derive_seed(config.global_seed, "eval:ids", 0));
  const int width = digits_for(n_queries, 6);

  struct Job {
    ProvenanceRecord record;
    const SourceEntry* source;
  };
  std::vector<Job> jobs;
  for (const auto& g : gallery_sources) {
    jobs.push_back({{g.id, g.id, RecordSplit::gallery, {}, std::nullopt, "gallery/" + g.id + ".png", g.path.string()},
                    &g});
  }
  GroundTruth gt;
  for (std::size_t j = 0; j < n_queries; ++j) {
    const bool is_true = j < config.n_true_queries;
    const SourceEntry& src = is_true ? gallery_sources[true_pick[j]]
                                     : distractor_sources[distractor_pick[(j - config.n_true_queries) %
                                                                          distractor_sources.size()]];
    ProvenanceRecord rec;
    rec.id = "Q" + padded(id_order[j], width);
    rec.source_id = src.id;
    rec.split = is_true ? RecordSplit::query : RecordSplit::distractor;
    rec.path = "queries/" + rec.id + ".png";
    rec.source_path = src.path.string();
    if (is_true) gt.source_of.emplace(rec.id, src.id);
    jobs.push_back({std::move(rec), &src});
  }

  fs::create_directories(out_root / "gallery");
  fs::create_directories(out_root / "queries");
  const SourcePartners partners(distractor_sources);
  Collector out;
  parallel_for(jobs.size(), config.workers, [&](std::size_t i) {
    ProvenanceRecord rec = jobs[i].record;
    try {
      const Image image = read_image(jobs[i].source->path);
      const bool transform = rec.split != RecordSplit::gallery && !config.noop_queries;
      if (transform) {
        rec.combo = sample_combo(patterns, derive_seed(config.global_seed, rec.id, 0), config.kmin, config.kmax);
      }
      write_png(transform ? apply_combo(image, rec.combo, &partners) : image, out_root / rec.path);
      out.add(std::move(rec));
    } catch (const std::exception& e) {
      out.fail(rec.id, e.what());
    }
  });

  EvalForgeResult result;
  for (auto& r : out.take_records()) {
    (r.split == RecordSplit::gallery ? result.gallery : result.queries).push_back(std::move(r));
  }
  result.errors = out.take_errors();
  // Failed true queries leave the ground truth.
  for (const auto& e : result.errors) gt.source_of.erase(e.record_id);
  result.ground_truth = std::move(gt);

  write_records(out_root / "gallery.jsonl", result.gallery);
  write_records(out_root / "queries.jsonl", result.queries);
  write_ground_truth(out_root / "gt.csv", result.ground_truth);
  write_errors(out_root / "errors.jsonl", result.errors);
  return result;
}

std::vector<std::string> true_query_combo_keys(const std::vector<ProvenanceRecord>& queries,
                                               const GroundTruth& ground_truth) {
  std::set<std::string> keys;
  for (const auto& q : queries) {
    if (ground_truth.contains(q.id) && !q.combo.empty()) keys.insert(combo_key(q.combo));
  }
  return {keys.begin(), keys.end()};
}

PoolForgeResult build_prompt_pool(const std::vector<SourceEntry>& sources, const std::vector<std::string>& combo_keys,
                                  const ForgeConfig& config, const std::vector<std::string>& excluded_source_ids,
                                  const fs::path& out_root) {
  const std::set<std::string> excluded(excluded_source_ids.begin(), excluded_source_ids.end());
  std::vector<const SourceEntry*> eligible;
  for (const auto& s : sources) {
    if (!excluded.contains(s.id)) eligible.push_back(&s);
  }
  std::vector<std::string> keys = combo_keys;
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  for (const auto& key : keys) {
    const auto set = parse_combo_key(key);
    if (set.empty()) throw ConfigError("empty combo key");
    for (const auto& id : set) {
      if (find_pattern(id).split != Split::novel) throw ConfigError("pool combo uses non-novel pattern " + id);
    }
  }
  const std::size_t per_key = config.pool_pairs_per_combo;
  if (!keys.empty() && per_key > 0 && eligible.size() < per_key) {
    throw ConfigError("need at least " + std::to_string(per_key) + " pool sources disjoint from gallery and queries, have " +
                      std::to_string(eligible.size()));
  }

  const auto order = seeded_permutation(eligible.size(), derive_seed(config.global_seed, "pool:sources", 0));
  const int key_width = digits_for(keys.size(), 4);
  const int pair_width = digits_for(per_key, 2);
  fs::create_directories(out_root / "pool");

  std::vector<PromptPoolEntry> entries(keys.size() * per_key);
  std::vector<std::optional<RecordError>> failures(entries.size());
  parallel_for(entries.size(), config.workers, [&](std::size_t n) {
    const std::size_t k = n / per_key;
    const std::size_t j = n % per_key;
    const SourceEntry& src = *eligible[order[n % eligible.size()]];
    PromptPoolEntry e;
    e.pair_id = "P" + padded(k, key_width) + "_" + padded(j, pair_width);
    e.combo_key = keys[k];
    e.source_id = src.id;
    e.original_id = e.pair_id + "_o";
    e.replica_id = e.pair_id + "_r";
    e.original_path = "pool/" + e.original_id + ".png";
    e.replica_path = "pool/" + e.replica_id + ".png";
    try {
      const auto set = parse_combo_key(keys[k]);
      std::vector<std::string> ids(set.begin(), set.end());
      SplitMix64 rng(derive_seed(config.global_seed, e.pair_id, 0));
      rng.shuffle(std::span(ids));
      for (const auto& id : ids) e.combo.instances.push_back(sample_instance(id, rng.next()));
      const Image image = read_image(src.path);
      write_png(image, out_root / e.original_path);
      write_png(apply_combo(image, e.combo), out_root / e.replica_path);
      entries[n] = std::move(e);
    } catch (const std::exception& ex) {
      failures[n] = RecordError{e.pair_id, ex.what()};
    }
  });

  PoolForgeResult result;
  for (std::size_t n = 0; n < entries.size(); ++n) {
    if (failures[n]) {
      result.errors.push_back(*failures[n]);
    } else {
      result.entries.push_back(std::move(entries[n]));
    }
  }
  write_pool(out_root / "pool.jsonl", result.entries);
  write_errors(out_root / "pool_errors.jsonl", result.errors);
  return result;
}

void check_split_hygiene(const std::vector<ProvenanceRecord>& records, bool allow_noop) {
  for (const auto& r : records) {
    const bool eval = r.split == RecordSplit::query || r.split == RecordSplit::distractor;
    if (eval && r.combo.empty() && !allow_noop) throw InputError(r.id + ": query without patterns");
    if (r.split == RecordSplit::gallery && !r.combo.empty()) throw InputError(r.id + ": transformed gallery image");
    for (const auto& inst : r.combo.instances) {
      const Split s = find_pattern(inst.pattern_id).split;
      if (r.split == RecordSplit::train && s != Split::base) {
        throw InputError(r.id + ": training record uses novel pattern " + inst.pattern_id);
      }
      if (eval && s != Split::novel) {
        throw InputError(r.id + ": query uses base pattern " + inst.pattern_id);
      }
    }
  }
}

void check_split_hygiene(const std::vector<PromptPoolEntry>& entries) {
  for (const auto& e : entries) {
    if (e.combo.empty()) throw InputError(e.pair_id + ": empty pool combo");
    for (const auto& inst : e.combo.instances) {
      if (find_pattern(inst.pattern_id).split != Split::novel) {
        throw InputError(e.pair_id + ": pool pair uses base pattern " + inst.pattern_id);
      }
    }
    if (combo_key(e.combo) != e.combo_key) throw InputError(e.pair_id + ": combo does not match its key");
  }
}

void write_errors(const fs::path& path, const std::vector<RecordError>& errors) {
  if (errors.empty()) {
    std::error_code ec;
    fs::remove(path, ec);
    return;
  }
  std::vector<nlohmann::json> rows;
  for (const auto& e : errors) rows.push_back({{"id", e.record_id}, {"error", e.message}});
  write_jsonl(path, rows);
}

}  // namespace patternforge
