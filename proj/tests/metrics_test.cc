#include "tgg/metrics.h"

#include <gtest/gtest.h>

#include <random>

#include "test_util.h"

namespace tgg {
namespace {

EdgeSet Edges(std::initializer_list<std::pair<const char*, const char*>> list) {
  EdgeSet out;
  for (const auto& [a, b] : list) out.insert({a, b});
  return out;
}

Scenario Abc() {
  Scenario s;
  s.id = "abc";
  s.title = "abc";
  s.events = {{"A", "a"}, {"B", "b"}, {"C", "c"}};
  s.gold_edges = {{"A", "B"}, {"B", "C"}};
  return s;
}

CanonicalGraph Pred(const Scenario& s, const EdgeSet& edges, bool valid = true) {
  CanonicalGraph g;
  g.graph = TemporalGraph(s.EventIds());
  for (const auto& e : edges) g.graph.AddEdge(e.from, e.to);
  g.valid = valid;
  return g;
}

TEST(PrecisionRecallF1, Identity) {
  auto gold = Edges({{"A", "B"}, {"B", "C"}});
  auto r = PrecisionRecallF1(gold, gold);
  EXPECT_DOUBLE_EQ(r.precision, 1);
  EXPECT_DOUBLE_EQ(r.recall, 1);
  EXPECT_DOUBLE_EQ(r.f1, 1);
}

TEST(PrecisionRecallF1, HalfRight) {
  auto r = PrecisionRecallF1(Edges({{"A", "B"}, {"B", "C"}}), Edges({{"A", "B"}, {"C", "B"}}));
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
  EXPECT_DOUBLE_EQ(r.f1, 0.5);
}

TEST(PrecisionRecallF1, EmptyPredictionAndEmptyGold) {
  auto r = PrecisionRecallF1(Edges({{"A", "B"}}), {});
  EXPECT_EQ(r.f1, 0);
  EXPECT_THROW(PrecisionRecallF1({}, Edges({{"A", "B"}})), Error);
}

TEST(PrecisionRecallF1, Properties) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 500; ++t) {
    EdgeSet gold, pred;
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        if (i == j) continue;
        if (rng() % 5 == 0) gold.insert({std::to_string(i), std::to_string(j)});
        if (rng() % 5 == 0) pred.insert({std::to_string(i), std::to_string(j)});
      }
    }
    if (gold.empty()) continue;
    auto r = PrecisionRecallF1(gold, pred);
    EXPECT_GE(r.f1, 0);
    EXPECT_LE(r.f1, 1);
    EXPECT_EQ(r.f1 == 1.0, gold == pred);
    if (r.precision + r.recall > 0) {
      EXPECT_NEAR(r.f1, 2 * r.precision * r.recall / (r.precision + r.recall), 1e-12);
    }
  }
}

TEST(PairwiseConsistency, Examples) {
  auto g = Edges({{"A", "B"}, {"B", "C"}});
  EXPECT_DOUBLE_EQ(PairwiseConsistency({g, g, g}), 1.0);
  EXPECT_DOUBLE_EQ(PairwiseConsistency({g, Edges({{"A", "B"}})}), 0.5);
  EXPECT_DOUBLE_EQ(PairwiseConsistency({g, {}}), 0.0);
  EXPECT_DOUBLE_EQ(PairwiseConsistency({{}, {}}), 0.0);
  EXPECT_THROW(PairwiseConsistency({g}), Error);
}

TEST(PairwiseConsistency, InvariantUnderPermutation) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 100; ++t) {
    std::vector<EdgeSet> sets(4);
    for (auto& s : sets) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          if (i != j && rng() % 3 == 0) s.insert({std::to_string(i), std::to_string(j)});
        }
      }
    }
    const double base = PairwiseConsistency(sets);
    std::shuffle(sets.begin(), sets.end(), rng);
    EXPECT_NEAR(PairwiseConsistency(sets), base, 1e-12);
  }
}

TEST(ScorePrediction, PerfectPrediction) {
  const Scenario s = Abc();
  auto card = ScorePrediction(s, 1, Pred(s, s.GoldEdgeSet()));
  EXPECT_EQ(card.scenario_id, "abc");
  EXPECT_EQ(card.shuffle, 1);
  EXPECT_DOUBLE_EQ(card.f1, 1);
  EXPECT_EQ(card.ged, 0);
  EXPECT_DOUBLE_EQ(card.edge_ratio, 1);
  EXPECT_EQ(card.components, 1u);
  EXPECT_TRUE(card.valid);
}

TEST(ScorePrediction, InvalidPredictionConvention) {
  const Scenario s = Abc();
  auto card = ScorePrediction(s, 0, Pred(s, {}, false));
  EXPECT_FALSE(card.valid);
  EXPECT_EQ(card.f1, 0);
  EXPECT_EQ(card.edge_ratio, 0);
  EXPECT_EQ(card.components, 0u);
  // Every gold node and edge inserted.
  EXPECT_EQ(card.ged, 3 + 2);
  ScoringOptions opts;
  opts.invalid_components = InvalidComponents::kNodeCount;
  EXPECT_EQ(ScorePrediction(s, 0, Pred(s, {}, false), opts).components, 3u);
}

TEST(ScorePrediction, EdgeRatioIsExact) {
  const Scenario s = Abc();
  auto card = ScorePrediction(s, 0, Pred(s, Edges({{"A", "B"}, {"A", "C"}, {"B", "C"}})));
  EXPECT_DOUBLE_EQ(card.edge_ratio, 1.5);
}

TEST(Aggregate, PerfectCards) {
  const Scenario s = Abc();
  std::vector<ScoreCard> cards;
  std::map<std::string, std::vector<EdgeSet>> preds;
  for (int k = 0; k < 3; ++k) {
    cards.push_back(ScorePrediction(s, k, Pred(s, s.GoldEdgeSet())));
    preds[s.id].push_back(s.GoldEdgeSet());
  }
  auto row = Aggregate("toy", "gold", cards, preds);
  EXPECT_DOUBLE_EQ(row.f1, 100);
  EXPECT_DOUBLE_EQ(row.ged, 0);
  EXPECT_DOUBLE_EQ(row.components, 1);
  EXPECT_DOUBLE_EQ(row.consistency, 100);
  EXPECT_EQ(row.cards, 3u);
}

TEST(Aggregate, MissingShuffleListsScenario) {
  const Scenario s = Abc();
  std::vector<ScoreCard> cards = {ScorePrediction(s, 0, Pred(s, s.GoldEdgeSet()))};
  std::map<std::string, std::vector<EdgeSet>> preds = {{"abc", {s.GoldEdgeSet()}}};
  try {
    Aggregate("toy", "m", cards, preds);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("abc"), std::string::npos);
  }
}

TEST(Aggregate, ConsistencyPoolingSwitch) {
  // Scenario x: 3 graphs, pair scores 1, 0.5, 0.5. Scenario y: 2 graphs
  // (configured as 2 shuffles elsewhere is not allowed, so both use 3).
  auto ab = Edges({{"A", "B"}});
  auto abc = Edges({{"A", "B"}, {"B", "C"}});
  std::map<std::string, std::vector<EdgeSet>> preds = {
      {"x", {abc, abc, ab}}, {"y", {ab, {}, {}}}};
  std::vector<ScoreCard> cards;
  for (const char* id : {"x", "y"}) {
    for (int k = 0; k < 3; ++k) {
      ScoreCard c;
      c.scenario_id = id;
      c.shuffle = k;
      cards.push_back(c);
    }
  }
  // x: (1 + 0.5 + 0.5) / 3 = 2/3; y: 0.
  auto per = Aggregate("d", "m", cards, preds);
  EXPECT_NEAR(per.consistency, 100.0 / 3, 1e-9);
  AggregateOptions pooled;
  pooled.pooling = ConsistencyPooling::kPooled;
  // Equal pair counts, so pooling agrees here.
  EXPECT_NEAR(Aggregate("d", "m", cards, preds, pooled).consistency, 100.0 / 3, 1e-9);
}

TEST(CardsJsonl, RoundTrip) {
  const Scenario s = Abc();
  std::vector<ScoreCard> cards = {ScorePrediction(s, 0, Pred(s, s.GoldEdgeSet())),
                                  ScorePrediction(s, 1, Pred(s, {}, false))};
  const std::string text = CardsToJsonl(cards);
  EXPECT_EQ(CardsFromJsonl(text), cards);
  EXPECT_EQ(CardsToJsonl(CardsFromJsonl(text)), text);
}

TEST(Report, FormatsTableColumns) {
  ReportRow r;
  r.dataset = "schema11";
  r.method = "random";
  r.precision = 19.44;
  r.recall = 19.46;
  r.f1 = 19.45;
  r.ged = 3.914;
  r.edge_ratio = 0.9623;
  r.components = 1;
  r.consistency = 33.33;
  const std::string md = ReportMarkdown({r});
  EXPECT_NE(md.find("| schema11 | random | 19.4 | 19.5 | 19.4 | 3.91 | 0.96 | 1.00 | 33.3 |"),
            std::string::npos)
      << md;
  const std::string csv = ReportCsv({r});
  EXPECT_NE(csv.find("schema11,random,19.4,19.5,19.4,3.91,0.96,1.00,33.3"), std::string::npos)
      << csv;
  EXPECT_EQ(RowFromJson(ToJson(r)).f1, r.f1);
}

}  // namespace
}  // namespace tgg
