#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "patternforge/manifest.hpp"
#include "patternforge/patterns.hpp"

namespace patternforge {

struct ForgeConfig {
  std::uint64_t global_seed = 0;
  std::size_t replicas_per_original = 9;
  int kmin = 1;
  int kmax = 3;
  std::size_t n_true_queries = 200;
  std::size_t n_distractor_queries = 800;
  std::size_t pool_pairs_per_combo = 10;
  Split pattern_split = Split::base;
  /// Restricts the split to one pattern category (e.g. photometric-only runs).
  std::optional<Category> category;
  /// Queries are exact copies of their sources (harness sanity runs).
  bool noop_queries = false;
  std::size_t workers = 1;

  /// Throws ConfigError on kmin < 1, kmax > 3, kmin > kmax or a range wider
  /// than the selected pattern set.
  void validate() const;
};

struct RecordError {
  std::string record_id;
  std::string message;
};

/// Patterns of `split`, optionally restricted to one category, catalog order.
std::vector<std::string> eligible_patterns(Split split, std::optional<Category> category = std::nullopt);

/// k uniform in [kmin, kmax]; k distinct patterns in seeded shuffle order,
/// each with its own derived instance seed.
PatternCombo sample_combo(std::span<const std::string> patterns, std::uint64_t seed, int kmin, int kmax);
PatternCombo sample_combo(Split split, std::uint64_t seed, int kmin, int kmax);

struct TrainingForgeResult {
  std::vector<ProvenanceRecord> records;  // sorted by id
  std::vector<RecordError> errors;
};

/// Per source: one untransformed record plus `replicas_per_original` replicas
/// built from base patterns. Writes `train/` and `train.jsonl` under out_root
/// (plus `errors.jsonl` when any record failed).
TrainingForgeResult forge_training_set(const std::vector<SourceEntry>& sources, const ForgeConfig& config,
                                       const std::filesystem::path& out_root);

struct EvalForgeResult {
  std::vector<ProvenanceRecord> queries;  // true queries and distractors, sorted by id
  std::vector<ProvenanceRecord> gallery;
  GroundTruth ground_truth;
  std::vector<RecordError> errors;
};

/// Writes `gallery/`, `queries/`, `gallery.jsonl`, `queries.jsonl` and `gt.csv`.
EvalForgeResult forge_eval_set(const std::vector<SourceEntry>& gallery_sources,
                               const std::vector<SourceEntry>& distractor_sources, const ForgeConfig& config,
                               const std::filesystem::path& out_root);

/// Combo keys realised by the true queries, sorted.
std::vector<std::string> true_query_combo_keys(const std::vector<ProvenanceRecord>& queries,
                                               const GroundTruth& ground_truth);

struct PoolForgeResult {
  std::vector<PromptPoolEntry> entries;  // sorted by pair_id
  std::vector<RecordError> errors;
};

/// `pool_pairs_per_combo` (original, replica) pairs per key from sources whose
/// ids are not in `excluded_source_ids`. Writes `pool/` and `pool.jsonl`.
PoolForgeResult build_prompt_pool(const std::vector<SourceEntry>& sources,
                                  const std::vector<std::string>& combo_keys, const ForgeConfig& config,
                                  const std::vector<std::string>& excluded_source_ids,
                                  const std::filesystem::path& out_root);

/// Throws InputError if a record uses patterns from the wrong split
/// (train: base only; queries and distractors: non-empty novel combos unless
/// `allow_noop`).
void check_split_hygiene(const std::vector<ProvenanceRecord>& records, bool allow_noop = false);
void check_split_hygiene(const std::vector<PromptPoolEntry>& entries);

void write_errors(const std::filesystem::path& path, const std::vector<RecordError>& errors);

}  // namespace patternforge
