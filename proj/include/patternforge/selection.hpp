#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patternforge/descriptors.hpp"
#include "patternforge/manifest.hpp"

namespace patternforge {

enum class SelectionMode { random, feature, ground_truth, wrong, self_upper, zero_shot };

std::string_view to_string(SelectionMode mode) noexcept;
SelectionMode parse_selection_mode(std::string_view text);

/// One prompt pair assigned to a query. Pool pairs carry their pool ids;
/// self_upper pairs are synthetic (`self:<query_id>`).
struct AssignedPair {
  std::string pair_id;
  std::string combo_key;
  std::string original_id;
  std::string original_path;
  std::string replica_id;
  std::string replica_path;

  friend bool operator==(const AssignedPair&, const AssignedPair&) = default;
};

struct PromptAssignment {
  SelectionMode mode = SelectionMode::zero_shot;
  std::map<std::string, std::vector<AssignedPair>, std::less<>> pairs;  // by query id

  friend bool operator==(const PromptAssignment&, const PromptAssignment&) = default;
};

/// JSON lines, one `{"query_id", "mode", "pairs": [...]}` object per query.
void write_assignment(const std::filesystem::path& path, const PromptAssignment& assignment);
PromptAssignment read_assignment(const std::filesystem::path& path);

struct SelectionInputs {
  /// Query manifest (ids, combos, paths).
  std::vector<ProvenanceRecord> queries;
  std::vector<PromptPoolEntry> pool;
  /// Pattern features; pool rows are looked up by pair id, then replica id.
  const Descriptors* query_features = nullptr;
  const Descriptors* pool_features = nullptr;
  /// Evaluation ground truth; required by ground_truth / wrong / self_upper.
  const GroundTruth* ground_truth = nullptr;
  std::size_t n = 1;
  std::uint64_t seed = 0;
};

/// Assigns up to `n` prompt pairs to every query.
PromptAssignment select_prompts(SelectionMode mode, const SelectionInputs& inputs);

}  // namespace patternforge
