#include "tgg/datasets.h"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "test_util.h"

namespace tgg {
namespace {

using testing::SourcePath;
using testing::TempDir;

void Write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

TEST(ScenarioJsonl, RoundTrip) {
  std::mt19937_64 rng(51);
  std::vector<Scenario> scenarios;
  for (int i = 0; i < 20; ++i) scenarios.push_back(testing::SyntheticScenario(rng, "s" + std::to_string(i), 2, 12));
  scenarios[3].domain = Domain::kNews;
  scenarios[4].split = Split::kTrain;
  const std::string text = ScenariosToJsonl(scenarios);
  EXPECT_EQ(ScenariosFromJsonl(text), scenarios);
  TempDir dir("jsonl");
  WriteScenarios(dir.path() / "x.jsonl", scenarios);
  EXPECT_EQ(ReadScenarios(dir.path() / "x.jsonl"), scenarios);
}

TEST(LoadProscript, UpstreamRecords) {
  TempDir dir("proscript");
  Write(dir.path() / "train.jsonl",
        R"({"scenario": "bake a cake", "events": {"0": "mix", "1": "pour", "2": "bake", "10": "eat"}, "gold_edges_for_prediction": ["0->1", "1->2", "2->10"]})"
        "\n"
        R"({"scenario": "loop", "events": {"0": "a", "1": "b"}, "gold_edges_for_prediction": ["0->1", "1->0"]})"
        "\n");
  Write(dir.path() / "test.jsonl",
        R"({"id": "t1", "scenario": "walk", "flatten_input_for_edge_prediction": "step0: stand up; step1: walk", "flatten_output_for_edge_prediction": "step0 -> step1"})"
        "\n");
  LoadReport report;
  auto s = LoadProscript(dir.path(), &report);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(report.read, 3u);
  ASSERT_EQ(report.rejected.size(), 1u);
  EXPECT_NE(report.rejected[0].find("cycle"), std::string::npos) << report.rejected[0];
  // Files are read in name order: test.jsonl, then train.jsonl.
  EXPECT_EQ(s[0].id, "t1");
  EXPECT_EQ(s[0].split, Split::kEval);
  EXPECT_EQ(s[0].events[1].description, "walk");
  EXPECT_EQ(s[1].split, Split::kTrain);
  EXPECT_EQ(s[1].events.back().id, "10");
  EXPECT_EQ(s[1].gold_edges.size(), 3u);
}

TEST(LoadSchema11, RequiresElevenScenarios) {
  TempDir dir("schema");
  std::mt19937_64 rng(52);
  std::vector<Scenario> eleven;
  for (int i = 0; i < 11; ++i) eleven.push_back(testing::SyntheticScenario(rng, "n" + std::to_string(i), 3, 11));
  WriteScenarios(dir.path() / "schema11.jsonl", eleven);
  auto loaded = LoadSchema11(dir.path() / "schema11.jsonl");
  EXPECT_EQ(loaded.size(), 11u);
  EXPECT_EQ(loaded[0].domain, Domain::kNews);
  eleven.pop_back();
  WriteScenarios(dir.path() / "ten.jsonl", eleven);
  EXPECT_THROW(LoadSchema11(dir.path() / "ten.jsonl"), Error);
}

TEST(LoadWikihow, FiltersAndChains) {
  TempDir dir("wikihow");
  std::string steps21 = "[";
  for (int i = 0; i < 21; ++i) steps21 += std::string(i ? "," : "") + "\"s" + std::to_string(i) + "\"";
  steps21 += "]";
  Write(dir.path() / "wh.json",
        "[{\"id\": \"w1\", \"title\": \"How to Tie a Tie\", \"ordered\": true, \"steps\": [\"Drape the tie.\", {\"headline\": \"Cross the wide end.\"}, \"Pull it tight.\"]},"
        " {\"id\": \"w2\", \"title\": \"Unordered\", \"ordered\": false, \"steps\": [\"a\", \"b\"]},"
        " {\"id\": \"w3\", \"title\": \"Spanish\", \"ordered\": 1, \"lang\": \"es\", \"steps\": [\"a\", \"b\"]},"
        " {\"id\": \"w4\", \"title\": \"Long\", \"ordered\": \"yes\", \"steps\": " + steps21 + "}]");
  LoadReport report;
  auto s = LoadWikihow(dir.path() / "wh.json", &report);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(report.rejected.size(), 3u);
  EXPECT_EQ(s[0].events.size(), 3u);
  EXPECT_TRUE(IsLinearChain(GoldGraph(s[0])));
  EXPECT_EQ(s[0].events[1].description, "Cross the wide end.");
}

TEST(Manifest, Statistics) {
  Scenario a;
  a.id = "a";
  a.title = "a";
  a.events = {{"1", "one two"}, {"2", "three"}, {"3", "four five six"}};
  a.gold_edges = {{"1", "2"}, {"1", "3"}};
  Scenario b;
  b.id = "b";
  b.title = "b";
  b.events = {{"1", "x"}, {"2", "y"}};
  b.gold_edges = {{"1", "2"}};
  auto m = ComputeManifest("proscript", "inline", {a, b});
  EXPECT_EQ(m.scenarios, 2u);
  EXPECT_DOUBLE_EQ(m.mean_events, 2.5);
  EXPECT_EQ(m.max_events, 3u);
  EXPECT_DOUBLE_EQ(m.mean_edges, 1.5);
  EXPECT_DOUBLE_EQ(m.mean_event_words, 8.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.percent_nonlinear, 50.0);
  auto checks = CheckManifest(m);
  ASSERT_EQ(checks.size(), 2u);
  EXPECT_FALSE(checks[0].pass);
}

TEST(Manifest, WikihowNotesTheCountDiscrepancy) {
  auto m = ComputeManifest("wikihow", "inline", {});
  ASSERT_EQ(m.notes.size(), 1u);
  EXPECT_NE(m.notes[0].find("2,991"), std::string::npos);
}

TEST(PublishedStats, ChainEdgeRatioArithmetic) {
  const auto& p = PublishedStatsFor("proscript");
  EXPECT_NEAR(LinearChainEdgeRatio(p.mean_events, p.mean_edges), (7.46 - 1) / 6.95, 1e-12);
  const auto& s = PublishedStatsFor("schema11");
  EXPECT_NEAR(LinearChainEdgeRatio(s.mean_events, s.mean_edges), 0.9624, 1e-4);
  EXPECT_THROW(PublishedStatsFor("nope"), Error);
}

TEST(DemoBank, ShippedBankIsValid) {
  DemoBank bank = DemoBank::Load(SourcePath("data/demo_bank.json"));
  EXPECT_EQ(bank.entries.size(), kDemoBankSize);
  int nonlinear = 0;
  for (const auto& e : bank.entries) nonlinear += HasBranch(GoldGraph(e.scenario));
  EXPECT_GE(nonlinear, 1);
}

TEST(DemoBank, SaveLoadAndSelect) {
  DemoBank bank = DemoBank::Load(SourcePath("data/demo_bank.json"));
  const NarrativeKey key{"gpt-4", InstructionType::kSimpleReport, InputFormat::kAlphabetical};
  EXPECT_EQ(SelectDemos(bank, 5, std::nullopt).size(), 5u);
  EXPECT_THROW(SelectDemos(bank, 5, key), Error);
  EXPECT_THROW(SelectDemos(bank, 16, std::nullopt), Error);
  for (auto& e : bank.entries) e.narratives[key.ToString()] = "story of " + e.scenario.title;
  bank.entries[2].unusable.insert(key.ToString());
  EXPECT_EQ(SelectDemos(bank, 2, key)[1].reference_narrative, "story of wash the car");
  try {
    SelectDemos(bank, 3, key);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("demo-03"), std::string::npos);
  }
  TempDir dir("bank");
  bank.Save(dir.path() / "bank.json");
  DemoBank back = DemoBank::Load(dir.path() / "bank.json");
  EXPECT_EQ(back.entries[0].narratives, bank.entries[0].narratives);
  EXPECT_EQ(back.entries[2].unusable, bank.entries[2].unusable);
}

TEST(DemoBank, ValidateRejectsWrongSize) {
  DemoBank bank = DemoBank::Load(SourcePath("data/demo_bank.json"));
  bank.entries.pop_back();
  EXPECT_THROW(bank.Validate(), Error);
}

}  // namespace
}  // namespace tgg
