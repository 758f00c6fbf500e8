#include <gtest/gtest.h>

#include <random>

#include "patternforge/errors.hpp"
#include "patternforge/metrics.hpp"
#include "patternforge/selection.hpp"
#include "test_support.hpp"

namespace pf = patternforge;

namespace {

pf::PatternCombo combo_of(std::initializer_list<const char*> ids) {
  pf::PatternCombo c;
  std::uint64_t s = 0;
  for (const char* id : ids) c.instances.push_back(pf::sample_instance(id, ++s));
  return c;
}

pf::ProvenanceRecord query(const std::string& id, pf::PatternCombo combo, const std::string& source = "g0") {
  return {id, source, pf::RecordSplit::query, std::move(combo), std::nullopt, "queries/" + id + ".png",
          "src/" + source + ".png"};
}

pf::PromptPoolEntry pair(const std::string& pair_id, pf::PatternCombo combo) {
  return {pair_id,        pf::combo_key(combo), "p" + pair_id, pair_id + "_o", "pool/" + pair_id + "_o.png",
          pair_id + "_r", "pool/" + pair_id + "_r.png", std::move(combo)};
}

struct Fixture {
  std::vector<pf::ProvenanceRecord> queries;
  std::vector<pf::PromptPoolEntry> pool;
  pf::GroundTruth gt;
};

Fixture small_forge() {
  Fixture f;
  f.queries = {query("Q0", combo_of({"Mosaic", "Swirl"}), "g0"), query("Q1", combo_of({"Voronoi"}), "g1"),
               query("Q2", combo_of({"Pyramid", "OilPaint", "WaveBlock"}), "g2"),
               query("Q3", combo_of({"Swirl"}), "g3")};
  for (const auto* key : {"Mosaic+Swirl", "Voronoi", "OilPaint+Pyramid+WaveBlock", "Swirl"}) {
    const auto set = pf::parse_combo_key(key);
    for (int j = 0; j < 3; ++j) {
      pf::PatternCombo c;
      for (const auto& id : set) c.instances.push_back(pf::sample_instance(id, static_cast<std::uint64_t>(j)));
      f.pool.push_back(pair(std::string("P") + std::to_string(f.pool.size()), c));
    }
  }
  for (const auto& q : f.queries) f.gt.source_of[q.id] = q.source_id;
  return f;
}

pf::SelectionInputs inputs(const Fixture& f, std::size_t n = 1, std::uint64_t seed = 0) {
  pf::SelectionInputs in;
  in.queries = f.queries;
  in.pool = f.pool;
  in.ground_truth = &f.gt;
  in.n = n;
  in.seed = seed;
  return in;
}

}  // namespace

TEST(SelectionMode, NamesRoundTrip) {
  for (auto m : {pf::SelectionMode::random, pf::SelectionMode::feature, pf::SelectionMode::ground_truth,
                 pf::SelectionMode::wrong, pf::SelectionMode::self_upper, pf::SelectionMode::zero_shot}) {
    EXPECT_EQ(pf::parse_selection_mode(pf::to_string(m)), m);
  }
  EXPECT_THROW(pf::parse_selection_mode("oracle"), pf::ConfigError);
}

TEST(Select, GroundTruthPicksEqualKeys) {
  const auto f = small_forge();
  const auto a = pf::select_prompts(pf::SelectionMode::ground_truth, inputs(f, 2));
  for (const auto& q : f.queries) {
    const auto& pairs = a.pairs.at(q.id);
    ASSERT_EQ(pairs.size(), 2u);
    for (const auto& p : pairs) EXPECT_EQ(p.combo_key, pf::combo_key(q.combo));
  }
  EXPECT_DOUBLE_EQ(pf::pattern_accuracy(a, f.queries, f.gt), 1.0);
}

TEST(Select, GroundTruthFallsBackToLargestOverlap) {
  auto f = small_forge();
  f.queries.push_back(query("Q4", combo_of({"Swirl", "Voronoi"}), "g4"));
  f.gt.source_of["Q4"] = "g4";
  const auto a = pf::select_prompts(pf::SelectionMode::ground_truth, inputs(f));
  const auto key = a.pairs.at("Q4").front().combo_key;
  EXPECT_TRUE(key == "Swirl" || key == "Voronoi" || key == "Mosaic+Swirl");
}

TEST(Select, WrongSharesNoPattern) {
  const auto f = small_forge();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = pf::select_prompts(pf::SelectionMode::wrong, inputs(f, 3, seed));
    for (const auto& q : f.queries) {
      const auto target = pf::pattern_set(q.combo);
      for (const auto& p : a.pairs.at(q.id)) {
        for (const auto& id : pf::parse_combo_key(p.combo_key)) EXPECT_FALSE(target.contains(id));
      }
    }
    EXPECT_DOUBLE_EQ(pf::pattern_accuracy(a, f.queries, f.gt), 0.0);
  }
}

TEST(Select, WrongWithoutCandidatesThrows) {
  Fixture f;
  f.queries = {query("Q0", combo_of({"Mosaic"}))};
  f.pool = {pair("P0", combo_of({"Mosaic", "Swirl"}))};
  f.gt.source_of["Q0"] = "g0";
  EXPECT_THROW(pf::select_prompts(pf::SelectionMode::wrong, inputs(f)), pf::SelectionError);
}

TEST(Select, SelfUpperUsesTheQueryAsReplica) {
  const auto f = small_forge();
  const auto a = pf::select_prompts(pf::SelectionMode::self_upper, inputs(f));
  for (const auto& q : f.queries) {
    const auto& pairs = a.pairs.at(q.id);
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_EQ(pairs[0].replica_id, q.id);
    EXPECT_EQ(pairs[0].original_id, q.source_id);
    EXPECT_EQ(pairs[0].replica_path, q.path);
  }
  EXPECT_DOUBLE_EQ(pf::pattern_accuracy(a, f.queries, f.gt), 1.0);
}

TEST(Select, ZeroShotAssignsNothing) {
  const auto f = small_forge();
  auto in = inputs(f);
  in.ground_truth = nullptr;
  const auto a = pf::select_prompts(pf::SelectionMode::zero_shot, in);
  ASSERT_EQ(a.pairs.size(), f.queries.size());
  for (const auto& [id, pairs] : a.pairs) EXPECT_TRUE(pairs.empty());
}

TEST(Select, GroundTruthModesNeedGroundTruth) {
  const auto f = small_forge();
  auto in = inputs(f);
  in.ground_truth = nullptr;
  for (auto m : {pf::SelectionMode::ground_truth, pf::SelectionMode::wrong, pf::SelectionMode::self_upper}) {
    EXPECT_THROW(pf::select_prompts(m, in), pf::ConfigError);
  }
  EXPECT_NO_THROW(pf::select_prompts(pf::SelectionMode::random, in));
}

TEST(Select, FeatureModeNeedsBothFeatureSets) {
  const auto f = small_forge();
  EXPECT_THROW(pf::select_prompts(pf::SelectionMode::feature, inputs(f)), pf::ConfigError);
}

TEST(Select, FeatureModeTakesTopCosine) {
  const auto f = small_forge();
  // One axis per pattern; features are normalized pattern indicators.
  const auto novel = pf::pattern_ids(pf::Split::novel);
  auto indicator = [&](const pf::PatternSet& set) {
    Eigen::RowVectorXf v = Eigen::RowVectorXf::Zero(6);
    for (std::size_t i = 0; i < novel.size(); ++i) {
      if (set.contains(novel[i])) v(static_cast<Eigen::Index>(i)) = 1.0f;
    }
    return Eigen::RowVectorXf(v / v.norm());
  };
  pf::Descriptors qf, pfeat;
  qf.vectors.resize(static_cast<Eigen::Index>(f.queries.size()), 6);
  for (std::size_t i = 0; i < f.queries.size(); ++i) {
    qf.ids.push_back(f.queries[i].id);
    qf.vectors.row(static_cast<Eigen::Index>(i)) = indicator(pf::pattern_set(f.queries[i].combo));
  }
  pfeat.vectors.resize(static_cast<Eigen::Index>(f.pool.size()), 6);
  for (std::size_t i = 0; i < f.pool.size(); ++i) {
    pfeat.ids.push_back(f.pool[i].pair_id);
    pfeat.vectors.row(static_cast<Eigen::Index>(i)) = indicator(pf::parse_combo_key(f.pool[i].combo_key));
  }
  auto in = inputs(f, 3);
  in.query_features = &qf;
  in.pool_features = &pfeat;
  const auto a = pf::select_prompts(pf::SelectionMode::feature, in);
  for (const auto& q : f.queries) {
    const auto& pairs = a.pairs.at(q.id);
    ASSERT_EQ(pairs.size(), 3u);
    for (const auto& p : pairs) EXPECT_EQ(p.combo_key, pf::combo_key(q.combo)) << q.id;
    // Exact ties resolve by ascending pair id.
    EXPECT_LT(pairs[0].pair_id, pairs[1].pair_id);
  }
  qf.ids[0] = "other";
  EXPECT_THROW(pf::select_prompts(pf::SelectionMode::feature, in), pf::ConfigError);
}

TEST(Select, RandomIsSeededAndDistinct) {
  const auto f = small_forge();
  const auto a = pf::select_prompts(pf::SelectionMode::random, inputs(f, 4, 1));
  EXPECT_EQ(a, pf::select_prompts(pf::SelectionMode::random, inputs(f, 4, 1)));
  EXPECT_NE(a, pf::select_prompts(pf::SelectionMode::random, inputs(f, 4, 2)));
  for (const auto& [id, pairs] : a.pairs) {
    std::set<std::string> ids;
    for (const auto& p : pairs) ids.insert(p.pair_id);
    EXPECT_EQ(ids.size(), 4u);
  }
}

TEST(Select, RandomModeExpectationOneThird) {
  // Query {A,B}; pool keys {A},{B},{C} in equal numbers.
  Fixture f;
  for (int j = 0; j < 4; ++j) {
    f.pool.push_back(pair("PA" + std::to_string(j), combo_of({"Mosaic"})));
    f.pool.push_back(pair("PB" + std::to_string(j), combo_of({"Swirl"})));
    f.pool.push_back(pair("PC" + std::to_string(j), combo_of({"Voronoi"})));
  }
  for (int i = 0; i < 100'000; ++i) {
    const std::string id = "Q" + std::to_string(i);
    f.queries.push_back(query(id, combo_of({"Mosaic", "Swirl"})));
    f.gt.source_of[id] = "g0";
  }
  const double expected = (1.0 + 1.0 + 0.0) / 3.0 * 0.5;
  EXPECT_NEAR(expected, 1.0 / 3.0, 1e-15);
  const auto a = pf::select_prompts(pf::SelectionMode::random, inputs(f, 1, 2024));
  EXPECT_NEAR(pf::pattern_accuracy(a, f.queries, f.gt), expected, 0.01);
}

TEST(Assignment, FileRoundTrip) {
  pftest::TempDir dir("prompts");
  const auto f = small_forge();
  for (auto m : {pf::SelectionMode::random, pf::SelectionMode::self_upper, pf::SelectionMode::zero_shot}) {
    const auto a = pf::select_prompts(m, inputs(f, 2, 3));
    pf::write_assignment(dir / "p.jsonl", a);
    EXPECT_EQ(pf::read_assignment(dir / "p.jsonl"), a);
  }
}
