// Corpus ingestion, the normalized scenario format and the demo bank.
//
// Normalized scenario (one JSON object per line):
//   {"id": "...", "title": "...",
//    "events": [{"id": "...", "description": "..."}],
//    "edges": [["src", "dst"]], "domain": "daily|news", "split": "train|eval"}

#ifndef TGG_DATASETS_H_
#define TGG_DATASETS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tgg/graph.h"
#include "tgg/prompt.h"

namespace tgg {

nlohmann::json ToJson(const Scenario& s);
Scenario ScenarioFromJson(const nlohmann::json& j);

std::string ScenariosToJsonl(const std::vector<Scenario>& scenarios);
std::vector<Scenario> ScenariosFromJsonl(const std::string& text);
std::vector<Scenario> ReadScenarios(const std::filesystem::path& path);
void WriteScenarios(const std::filesystem::path& path,
                    const std::vector<Scenario>& scenarios);

// Records a loader dropped, with the reason for each.
struct LoadReport {
  std::vector<std::string> rejected;
  std::size_t read = 0;
};

// ProScript release files (a .jsonl file or a directory of them). Accepts
// records with an "events" object and edges in "gold_edges_for_prediction"
// or "flatten_output_for_edge_prediction", and normalized records. Cyclic
// or malformed records are rejected into report.
std::vector<Scenario> LoadProscript(const std::filesystem::path& path,
                                    LoadReport* report = nullptr);

// The 11 curated news schemas, already converted to sentences and stored in
// the normalized format. Throws Error unless exactly 11 valid scenarios.
std::vector<Scenario> LoadSchema11(const std::filesystem::path& path);

inline constexpr std::size_t kWikihowMaxSteps = 20;

// WikiHow Script export (JSON array or JSONL) with "title", "steps" and an
// "ordered" flag. Keeps English, ordered articles with 2..20 steps and
// chains the steps in order.
std::vector<Scenario> LoadWikihow(const std::filesystem::path& path,
                                  LoadReport* report = nullptr);

struct CorpusManifest {
  std::string dataset;
  std::string source;
  std::size_t scenarios = 0;
  double mean_events = 0;
  std::size_t max_events = 0;
  double mean_edges = 0;
  double mean_event_words = 0;
  double percent_nonlinear = 0;
  std::vector<std::string> notes;
};

CorpusManifest ComputeManifest(const std::string& dataset,
                               const std::string& source,
                               const std::vector<Scenario>& scenarios);
nlohmann::json ToJson(const CorpusManifest& m);

// Published corpus statistics.
struct ReferenceStats {
  std::string dataset;
  std::size_t scenarios;
  double mean_events;
  std::size_t max_events;
  double mean_edges;
  double mean_event_words;
  double percent_nonlinear;
};

const std::vector<ReferenceStats>& PublishedStats();
const ReferenceStats& PublishedStatsFor(const std::string& dataset);

struct ManifestCheck {
  std::string what;
  double expected;
  double actual;
  double tolerance;
  bool pass;
};

// The per-dataset checks the shipped converters must meet.
std::vector<ManifestCheck> CheckManifest(const CorpusManifest& m);

// Edge ratio a linear chain over every event achieves on average, from
// corpus means: (mean events - 1) / mean edges.
double LinearChainEdgeRatio(double mean_events, double mean_edges);

struct BankEntry {
  Scenario scenario;
  // Narrative text per NarrativeKey::ToString().
  std::map<std::string, std::string> narratives;
  // Keys whose generation was refused or failed.
  std::set<std::string> unusable;
};

inline constexpr std::size_t kDemoBankSize = 15;

struct DemoBank {
  std::vector<BankEntry> entries;

  static DemoBank Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;
  nlohmann::json ToJson() const;
  static DemoBank FromJson(const nlohmann::json& j);

  // Exactly 15 valid training scenarios including a non-linear one.
  void Validate() const;
};

// First `shots` entries in bank order. With a key, each carries its
// narrative; a missing or unusable one is an Error.
std::vector<Demonstration> SelectDemos(const DemoBank& bank, int shots,
                                       const std::optional<NarrativeKey>& key);

}  // namespace tgg

#endif  // TGG_DATASETS_H_
