#include "patternforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "patternforge/errors.hpp"

namespace patternforge {

namespace {

std::string list_ids(const std::vector<std::string>& ids) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) out += (i ? ", " : "") + ids[i];
  if (ids.size() > shown) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

bool prediction_before(const Prediction& a, const Prediction& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  if (a.query_id != b.query_id) return a.query_id < b.query_id;
  return a.gallery_id < b.gallery_id;
}

std::vector<Prediction> top1_predictions(const MatchList& matches) {
  std::vector<Prediction> out;
  out.reserve(matches.size());
  for (const auto& qm : matches) {
    if (!qm.ranked.empty()) out.push_back({qm.query_id, qm.ranked.front().gallery_id, qm.ranked.front().score});
  }
  return out;
}

double micro_average_precision(std::span<const Prediction> predictions, const GroundTruth& gt) {
  if (gt.size() == 0) throw InputError("micro average precision needs at least one true query");
  std::set<std::string_view> seen;
  for (const auto& p : predictions) {
    if (!seen.insert(p.query_id).second) throw InputError("duplicate prediction row for query " + p.query_id);
    if (!std::isfinite(p.score)) throw InputError("non-finite score for query " + p.query_id);
  }
  std::vector<Prediction> rows(predictions.begin(), predictions.end());
  std::sort(rows.begin(), rows.end(), [](const Prediction& a, const Prediction& b) { return prediction_before(a, b); });

  double sum = 0.0;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto it = gt.source_of.find(rows[r].query_id);
    if (it == gt.source_of.end() || it->second != rows[r].gallery_id) continue;
    ++correct;
    sum += static_cast<double>(correct) / static_cast<double>(r + 1);
  }
  return sum / static_cast<double>(gt.size());
}

double recall_at_1(const MatchList& matches, const GroundTruth& gt) {
  if (gt.size() == 0) throw InputError("recall@1 needs at least one true query");
  std::size_t hits = 0;
  for (const auto& qm : matches) {
    const auto it = gt.source_of.find(qm.query_id);
    if (it != gt.source_of.end() && !qm.ranked.empty() && qm.ranked.front().gallery_id == it->second) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gt.size());
}

double pattern_accuracy(std::span<const std::pair<PatternSet, PatternSet>> cases) {
  if (cases.empty()) throw InputError("pattern accuracy needs at least one query");
  double sum = 0.0;
  for (const auto& [pq, ps] : cases) {
    if (pq.empty()) throw InputError("query pattern set is empty");
    std::size_t shared = 0;
    for (const auto& id : pq) shared += ps.count(id);
    sum += static_cast<double>(shared) / static_cast<double>(pq.size());
  }
  return sum / static_cast<double>(cases.size());
}

double pattern_accuracy(const PromptAssignment& assignment, const std::vector<ProvenanceRecord>& queries,
                        const GroundTruth& gt) {
  std::vector<std::pair<PatternSet, PatternSet>> cases;
  std::vector<std::string> unassigned;
  for (const auto& q : queries) {
    if (!gt.contains(q.id)) continue;
    const auto it = assignment.pairs.find(q.id);
    if (it == assignment.pairs.end() || it->second.empty()) {
      unassigned.push_back(q.id);
      continue;
    }
    cases.emplace_back(pattern_set(q.combo), parse_combo_key(it->second.front().combo_key));
  }
  if (!unassigned.empty()) throw InputError("queries without an assigned prompt pair: " + list_ids(unassigned));
  return pattern_accuracy(cases);
}

std::string EvalReport::to_json_text() const {
  std::string out = "{\n";
  out += "  \"mu_ap\": " + fixed6(mu_ap) + ",\n";
  out += "  \"recall_at_1\": " + fixed6(recall_at_1) + ",\n";
  if (pattern_acc) out += "  \"pattern_acc\": " + fixed6(*pattern_acc) + ",\n";
  out += "  \"counts\": {\"queries\": " + std::to_string(counts.queries) +
         ", \"true_queries\": " + std::to_string(counts.true_queries) +
         ", \"gallery\": " + std::to_string(counts.gallery) + "},\n";
  out += "  \"config\": " + nlohmann::json(config).dump() + "\n}\n";
  return out;
}

EvalReport EvalReport::parse(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    EvalReport r;
    r.mu_ap = j.at("mu_ap").get<double>();
    r.recall_at_1 = j.at("recall_at_1").get<double>();
    if (j.contains("pattern_acc")) r.pattern_acc = j.at("pattern_acc").get<double>();
    const auto& c = j.at("counts");
    r.counts = {c.at("queries").get<std::size_t>(), c.at("true_queries").get<std::size_t>(),
                c.at("gallery").get<std::size_t>()};
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("report: ") + e.what());
  }
}

EvalReport build_report(const ReportInputs& in) {
  if (in.matches == nullptr || in.ground_truth == nullptr) throw InputError("report needs matches and ground truth");
  const MatchList& matches = *in.matches;
  const GroundTruth& gt = *in.ground_truth;

  std::set<std::string> match_queries;
  std::set<std::string> match_gallery;
  std::vector<std::string> duplicates;
  for (const auto& qm : matches) {
    if (!match_queries.insert(qm.query_id).second) duplicates.push_back(qm.query_id);
    for (const auto& m : qm.ranked) match_gallery.insert(m.gallery_id);
  }
  if (!duplicates.empty()) throw InputError("duplicate queries in matches: " + list_ids(duplicates));

  EvalCounts counts{match_queries.size(), gt.size(), match_gallery.size()};
  if (in.queries != nullptr) {
    std::set<std::string> ids;
    for (const auto& q : *in.queries) ids.insert(q.id);
    std::vector<std::string> bad;
    for (const auto& id : match_queries) {
      if (!ids.count(id)) bad.push_back(id);
    }
    for (const auto& [id, src] : gt.source_of) {
      if (!ids.count(id)) bad.push_back(id);
    }
    if (!bad.empty()) throw InputError("query ids not in the query manifest: " + list_ids(bad));
    counts.queries = ids.size();
  }
  if (in.gallery != nullptr) {
    std::set<std::string> ids;
    for (const auto& g : *in.gallery) ids.insert(g.id);
    std::vector<std::string> bad;
    for (const auto& id : match_gallery) {
      if (!ids.count(id)) bad.push_back(id);
    }
    for (const auto& [id, src] : gt.source_of) {
      if (!ids.count(src)) bad.push_back(src);
    }
    if (!bad.empty()) throw InputError("gallery ids not in the gallery manifest: " + list_ids(bad));
    counts.gallery = ids.size();
  }

  EvalReport report;
  const auto preds = top1_predictions(matches);
  report.mu_ap = micro_average_precision(preds, gt);
  report.recall_at_1 = recall_at_1(matches, gt);
  if (in.assignment != nullptr) {
    if (in.queries == nullptr) throw InputError("pattern accuracy needs the query manifest");
    report.pattern_acc = pattern_accuracy(*in.assignment, *in.queries, gt);
  }
  report.counts = counts;
  report.config = in.config;
  return report;
}

}  // namespace patternforge
