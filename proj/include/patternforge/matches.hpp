#pragma once

#include <algorithm>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "patternforge/descriptors.hpp"
#include "patternforge/errors.hpp"
#include "patternforge/parallel.hpp"

namespace patternforge {

struct Match {
  std::string gallery_id;
  double score = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

/// Ranking order: higher score first, ties by ascending gallery id.
inline bool ranks_before(const Match& a, const Match& b) noexcept {
  return a.score > b.score || (a.score == b.score && a.gallery_id < b.gallery_id);
}

struct QueryMatches {
  std::string query_id;
  std::vector<Match> ranked;

  friend bool operator==(const QueryMatches&, const QueryMatches&) = default;
};

/// Per-query ranked candidates, in query order.
using MatchList = std::vector<QueryMatches>;

/// Cosine similarity of two unit rows, accumulated in double in index order so
/// the value does not depend on where either row lives in memory.
template <typename RowA, typename RowB>
double cosine_of_rows(const RowA& a, const RowB& b) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc += static_cast<double>(a(i)) * static_cast<double>(b(i));
  return acc;
}

/// Exact brute-force top-k cosine search. Parallel over queries; the result
/// is independent of `workers` and of gallery insertion order.
template <typename Scalar>
MatchList search_topk(const DescriptorSet<Scalar>& queries, const DescriptorSet<Scalar>& gallery, std::size_t k,
                      std::size_t workers = 1) {
  if (queries.dim() != gallery.dim()) {
    throw ShapeError("dimension mismatch: queries " + std::to_string(queries.dim()) + ", gallery " +
                     std::to_string(gallery.dim()));
  }
  if (k == 0) throw ConfigError("k must be >= 1");
  const auto n_gallery = static_cast<std::size_t>(gallery.size());
  const std::size_t keep = std::min(k, n_gallery);
  MatchList result(static_cast<std::size_t>(queries.size()));
  parallel_for(result.size(), workers, [&](std::size_t q) {
    std::vector<Match> all(n_gallery);
    const auto qrow = queries.vectors.row(static_cast<Eigen::Index>(q));
    for (std::size_t g = 0; g < n_gallery; ++g) {
      all[g] = {gallery.ids[g], cosine_of_rows(qrow, gallery.vectors.row(static_cast<Eigen::Index>(g)))};
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), ranks_before);
    all.resize(keep);
    result[q] = {queries.ids[q], std::move(all)};
  });
  return result;
}

/// Per (query, gallery) maximum over N match lists, re-ranked. Every list must
/// cover the same query ids; candidate sets per query may differ (union).
MatchList aggregate_max(std::span<const MatchList> lists);

/// Keeps the first k candidates of every query.
void truncate(MatchList& matches, std::size_t k);

/// CSV `query_id,gallery_id,score` with a header row; scores at 9 significant digits.
void write_matches(const MatchList& matches, const std::filesystem::path& path);
MatchList read_matches(const std::filesystem::path& path);

}  // namespace patternforge
