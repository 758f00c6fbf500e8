#include "patternforge/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "patternforge/errors.hpp"

namespace patternforge {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<SourceEntry> load_sources(const fs::path& dir_or_manifest) {
  std::vector<SourceEntry> sources;
  if (fs::is_directory(dir_or_manifest)) {
    for (const auto& item : fs::directory_iterator(dir_or_manifest)) {
      if (!item.is_regular_file()) continue;
      const auto ext = lower(item.path().extension().string());
      if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") {
        sources.push_back({item.path().stem().string(), item.path()});
      }
    }
  } else if (fs::is_regular_file(dir_or_manifest)) {
    const auto base = dir_or_manifest.parent_path();
    for (const auto& row : read_jsonl(dir_or_manifest)) {
      try {
        fs::path p = row.at("path").get<std::string>();
        sources.push_back({row.at("id").get<std::string>(), p.is_absolute() ? p : base / p});
      } catch (const nlohmann::json::exception& e) {
        throw InputError("source manifest " + dir_or_manifest.string() + ": " + e.what());
      }
    }
  } else {
    throw ConfigError("source path does not exist: " + dir_or_manifest.string());
  }
  std::sort(sources.begin(), sources.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < sources.size(); ++i) {
    if (sources[i].id == sources[i - 1].id) throw ConfigError("duplicate source id " + sources[i].id);
  }
  return sources;
}

void write_source_manifest(const std::vector<SourceEntry>& sources, const fs::path& path) {
  std::vector<nlohmann::json> rows;
  for (const auto& s : sources) rows.push_back({{"id", s.id}, {"path", s.path.string()}});
  write_jsonl(path, rows);
}

std::string_view to_string(RecordSplit split) noexcept {
  switch (split) {
    case RecordSplit::train: return "train";
    case RecordSplit::query: return "query";
    case RecordSplit::distractor: return "distractor";
    case RecordSplit::gallery: return "gallery";
    case RecordSplit::pool_original: return "pool_original";
    case RecordSplit::pool_replica: return "pool_replica";
  }
  return "?";
}

RecordSplit parse_record_split(std::string_view text) {
  for (auto s : {RecordSplit::train, RecordSplit::query, RecordSplit::distractor, RecordSplit::gallery,
                 RecordSplit::pool_original, RecordSplit::pool_replica}) {
    if (to_string(s) == text) return s;
  }
  throw InputError("unknown record split: " + std::string(text));
}

nlohmann::json to_json(const ProvenanceRecord& r) {
  nlohmann::json j = {{"id", r.id},
                      {"source_id", r.source_id},
                      {"split", to_string(r.split)},
                      {"combo", to_json(r.combo)},
                      {"path", r.path},
                      {"source_path", r.source_path}};
  if (r.pair_id) j["pair_id"] = *r.pair_id;
  return j;
}

ProvenanceRecord record_from_json(const nlohmann::json& j) {
  try {
    ProvenanceRecord r;
    r.id = j.at("id").get<std::string>();
    r.source_id = j.at("source_id").get<std::string>();
    r.split = parse_record_split(j.at("split").get<std::string>());
    r.combo = combo_from_json(j.at("combo"));
    r.path = j.at("path").get<std::string>();
    r.source_path = j.value("source_path", std::string());
    if (j.contains("pair_id")) r.pair_id = j.at("pair_id").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed provenance record: ") + e.what());
  }
}

nlohmann::json to_json(const PromptPoolEntry& e) {
  return {{"pair_id", e.pair_id},         {"combo_key", e.combo_key},
          {"source_id", e.source_id},     {"original_id", e.original_id},
          {"original_path", e.original_path}, {"replica_id", e.replica_id},
          {"replica_path", e.replica_path},   {"combo", to_json(e.combo)}};
}

PromptPoolEntry pool_entry_from_json(const nlohmann::json& j) {
  try {
    PromptPoolEntry e;
    e.pair_id = j.at("pair_id").get<std::string>();
    e.combo_key = j.at("combo_key").get<std::string>();
    e.source_id = j.at("source_id").get<std::string>();
    e.original_id = j.at("original_id").get<std::string>();
    e.original_path = j.at("original_path").get<std::string>();
    e.replica_id = j.at("replica_id").get<std::string>();
    e.replica_path = j.at("replica_path").get<std::string>();
    e.combo = combo_from_json(j.at("combo"));
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("malformed pool entry: ") + ex.what());
  }
}

void write_jsonl(const fs::path& path, const std::vector<nlohmann::json>& rows) {
  auto out = open_out(path);
  for (const auto& row : rows) out << row.dump() << '\n';
}

std::vector<nlohmann::json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<nlohmann::json> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      rows.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return rows;
}

void write_records(const fs::path& path, const std::vector<ProvenanceRecord>& records) {
  std::vector<nlohmann::json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  write_jsonl(path, rows);
}

std::vector<ProvenanceRecord> read_records(const fs::path& path) {
  std::vector<ProvenanceRecord> records;
  for (const auto& row : read_jsonl(path)) records.push_back(record_from_json(row));
  return records;
}

void write_pool(const fs::path& path, const std::vector<PromptPoolEntry>& entries) {
  std::vector<nlohmann::json> rows;
  for (const auto& e : entries) rows.push_back(to_json(e));
  write_jsonl(path, rows);
}

std::vector<PromptPoolEntry> read_pool(const fs::path& path) {
  std::vector<PromptPoolEntry> entries;
  std::set<std::string> seen;
  for (const auto& row : read_jsonl(path)) {
    entries.push_back(pool_entry_from_json(row));
    if (!seen.insert(entries.back().pair_id).second) {
      throw InputError("duplicate pair_id in pool: " + entries.back().pair_id);
    }
  }
  return entries;
}

void write_ground_truth(const fs::path& path, const GroundTruth& gt) {
  auto out = open_out(path);
  out << "query_id,source_id\n";
  for (const auto& [q, s] : gt.source_of) out << q << ',' << s << '\n';
}

GroundTruth read_ground_truth(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "query_id,source_id") {
    throw InputError(path.string() + ": expected header query_id,source_id");
  }
  GroundTruth gt;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == line.size()) {
      throw InputError(path.string() + ":" + std::to_string(number) + ": malformed row");
    }
    if (!gt.source_of.emplace(line.substr(0, comma), line.substr(comma + 1)).second) {
      throw InputError(path.string() + ": duplicate query " + line.substr(0, comma));
    }
  }
  return gt;
}

}  // namespace patternforge
