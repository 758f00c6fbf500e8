#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patternforge/patterns.hpp"

namespace patternforge {

/// One input image for the forge.
struct SourceEntry {
  std::string id;
  std::filesystem::path path;
};

/// Reads a source list: either a directory of PNG/JPEG files (id = file stem,
/// sorted by id) or a JSON-lines manifest of {"id", "path"} objects whose
/// relative paths resolve against the manifest's directory.
std::vector<SourceEntry> load_sources(const std::filesystem::path& dir_or_manifest);
void write_source_manifest(const std::vector<SourceEntry>& sources,
                           const std::filesystem::path& path);

enum class RecordSplit { train, query, distractor, gallery, pool_original, pool_replica };
std::string_view to_string(RecordSplit split) noexcept;
RecordSplit parse_record_split(std::string_view text);

/// Provenance of one forged image. `path` is relative to the run root;
/// `source_path` is where the untransformed source was read from.
struct ProvenanceRecord {
  std::string id;
  std::string source_id;
  RecordSplit split = RecordSplit::train;
  PatternCombo combo;
  std::optional<std::string> pair_id;
  std::string path;
  std::string source_path;

  friend bool operator==(const ProvenanceRecord&, const ProvenanceRecord&) = default;
};

nlohmann::json to_json(const ProvenanceRecord& record);
ProvenanceRecord record_from_json(const nlohmann::json& j);

/// One (original, replica) prompt pair conveying a novel pattern combination.
struct PromptPoolEntry {
  std::string pair_id;
  std::string combo_key;
  std::string source_id;
  std::string original_id;
  std::string original_path;
  std::string replica_id;
  std::string replica_path;
  PatternCombo combo;

  friend bool operator==(const PromptPoolEntry&, const PromptPoolEntry&) = default;
};

nlohmann::json to_json(const PromptPoolEntry& entry);
PromptPoolEntry pool_entry_from_json(const nlohmann::json& j);

/// query_id -> gallery/source id, for true queries only.
struct GroundTruth {
  std::map<std::string, std::string, std::less<>> source_of;

  std::size_t size() const noexcept { return source_of.size(); }
  bool contains(std::string_view query_id) const { return source_of.find(query_id) != source_of.end(); }
};

// JSON-lines helpers: one compact object per line, '\n' terminated.
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

void write_records(const std::filesystem::path& path, const std::vector<ProvenanceRecord>& records);
std::vector<ProvenanceRecord> read_records(const std::filesystem::path& path);
void write_pool(const std::filesystem::path& path, const std::vector<PromptPoolEntry>& entries);
std::vector<PromptPoolEntry> read_pool(const std::filesystem::path& path);

/// CSV with header `query_id,source_id`, rows sorted by query_id.
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt);
GroundTruth read_ground_truth(const std::filesystem::path& path);

}  // namespace patternforge
