#include "patternforge/matches.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

namespace patternforge {

namespace fs = std::filesystem;

MatchList aggregate_max(std::span<const MatchList> lists) {
  if (lists.empty()) throw ShapeError("aggregate_max needs at least one match list");
  std::set<std::string> reference;
  for (const auto& qm : lists.front()) {
    if (!reference.insert(qm.query_id).second) throw ShapeError("duplicate query " + qm.query_id);
  }
  for (std::size_t i = 1; i < lists.size(); ++i) {
    std::set<std::string> ids;
    for (const auto& qm : lists[i]) ids.insert(qm.query_id);
    if (ids != reference || lists[i].size() != reference.size()) {
      throw ShapeError("match list " + std::to_string(i) + " covers a different query set");
    }
  }

  MatchList out;
  out.reserve(lists.front().size());
  for (const auto& first : lists.front()) {
    std::map<std::string, double> best;
    for (const auto& list : lists) {
      const auto it = std::find_if(list.begin(), list.end(),
                                   [&](const QueryMatches& qm) { return qm.query_id == first.query_id; });
      for (const auto& m : it->ranked) {
        auto [slot, inserted] = best.emplace(m.gallery_id, m.score);
        if (!inserted) slot->second = std::max(slot->second, m.score);
      }
    }
    QueryMatches qm{first.query_id, {}};
    qm.ranked.reserve(best.size());
    for (auto& [id, score] : best) qm.ranked.push_back({id, score});
    std::sort(qm.ranked.begin(), qm.ranked.end(), ranks_before);
    out.push_back(std::move(qm));
  }
  return out;
}

void truncate(MatchList& matches, std::size_t k) {
  for (auto& qm : matches) {
    if (qm.ranked.size() > k) qm.ranked.resize(k);
  }
}

void write_matches(const MatchList& matches, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << "query_id,gallery_id,score\n";
  char buf[64];
  for (const auto& qm : matches) {
    for (const auto& m : qm.ranked) {
      std::snprintf(buf, sizeof buf, "%.9g", m.score);
      out << qm.query_id << ',' << m.gallery_id << ',' << buf << '\n';
    }
  }
}

MatchList read_matches(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "query_id,gallery_id,score") {
    throw InputError(path.string() + ": expected header query_id,gallery_id,score");
  }
  MatchList matches;
  std::unordered_map<std::string, std::size_t> index;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw InputError(path.string() + ":" + std::to_string(number) + ": malformed row");
    std::string query = line.substr(0, c1);
    Match m{line.substr(c1 + 1, c2 - c1 - 1), 0.0};
    try {
      std::size_t used = 0;
      const std::string score = line.substr(c2 + 1);
      m.score = std::stod(score, &used);
      if (used != score.size() || !std::isfinite(m.score)) throw std::invalid_argument("score");
    } catch (const std::exception&) {
      throw InputError(path.string() + ":" + std::to_string(number) + ": bad score");
    }
    auto [it, inserted] = index.emplace(query, matches.size());
    if (inserted) matches.push_back({std::move(query), {}});
    auto& ranked = matches[it->second].ranked;
    if (!ranked.empty() && ranks_before(m, ranked.back())) {
      throw InputError(path.string() + ":" + std::to_string(number) + ": rows for " + matches[it->second].query_id +
                       " are not in rank order");
    }
    ranked.push_back(std::move(m));
  }
  return matches;
}

}  // namespace patternforge
