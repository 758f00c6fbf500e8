#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "patternforge/manifest.hpp"
#include "patternforge/matches.hpp"
#include "patternforge/selection.hpp"

namespace patternforge {

struct Prediction {
  std::string query_id;
  std::string gallery_id;
  double score = 0.0;
};

/// Global ranking order: score descending, then query id, then gallery id.
bool prediction_before(const Prediction& a, const Prediction& b) noexcept;

/// One row per query holding its rank-1 match; queries without matches are skipped.
std::vector<Prediction> top1_predictions(const MatchList& matches);

/// Micro average precision over a globally ranked prediction list. Rows of
/// queries absent from `gt` count as wrong. Throws InputError on G = 0,
/// duplicate query rows or non-finite scores.
double micro_average_precision(std::span<const Prediction> predictions, const GroundTruth& gt);

/// Fraction of ground-truth queries whose rank-1 gallery id is their source.
/// A true query missing from `matches` counts as a miss.
double recall_at_1(const MatchList& matches, const GroundTruth& gt);

/// Mean of |Pq ∩ Ps| / |Pq| over (query patterns, prompt patterns) pairs.
double pattern_accuracy(std::span<const std::pair<PatternSet, PatternSet>> cases);

/// Accuracy over the ground-truth queries using each query's first assigned pair.
double pattern_accuracy(const PromptAssignment& assignment, const std::vector<ProvenanceRecord>& queries,
                        const GroundTruth& gt);

struct EvalCounts {
  std::size_t queries = 0;
  std::size_t true_queries = 0;
  std::size_t gallery = 0;

  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

struct EvalReport {
  double mu_ap = 0.0;
  double recall_at_1 = 0.0;
  std::optional<double> pattern_acc;
  EvalCounts counts;
  std::map<std::string, std::string> config;

  /// Pretty JSON; rates with 6 decimals.
  std::string to_json_text() const;
  static EvalReport parse(std::string_view text);

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct ReportInputs {
  const MatchList* matches = nullptr;
  const GroundTruth* ground_truth = nullptr;
  /// Manifests; when present, ids in matches and gt are checked against them.
  const std::vector<ProvenanceRecord>* queries = nullptr;
  const std::vector<ProvenanceRecord>* gallery = nullptr;
  /// Pattern-accuracy inputs (also needs `queries`).
  const PromptAssignment* assignment = nullptr;
  std::map<std::string, std::string> config;
};

/// Throws InputError listing offending ids when the id spaces disagree.
EvalReport build_report(const ReportInputs& inputs);

}  // namespace patternforge
