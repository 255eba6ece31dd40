// Experiment orchestration: shuffle protocol, random baseline, scoring,
// reference narrative generation, faithfulness judging and offline replay.
//
// Results directory:
//   manifest.json   config, input hashes, counts, per-scenario failures
//   cards.jsonl     one ScoreCard per (scenario, shuffle)
//   outputs.jsonl   parsed prediction per (scenario, shuffle)
//   raw/            <scenario>.<shuffle>.json pointing at the cache entry
//   report.md, report.csv, report.json

#ifndef TGG_RUNNER_H_
#define TGG_RUNNER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tgg/datasets.h"
#include "tgg/llm_client.h"
#include "tgg/metrics.h"
#include "tgg/parser.h"
#include "tgg/prompt.h"

namespace tgg {

inline constexpr std::string_view kRandomMethod = "random";

struct ExperimentConfig {
  std::string dataset = "proscript";
  // Normalized scenario JSONL.
  std::string data_path;
  // standard, cot, not or random.
  std::string method = "not";
  int shots = 5;
  InputFormat input_format = InputFormat::kAlphabetical;
  // Used by NoT with references; defaults to gpt-4/simple_report/<format>.
  std::optional<NarrativeKey> narrative_key;
  bool use_references = true;
  int shuffles = 3;
  std::uint64_t master_seed = 0;
  // "http" or "mock:<policy>".
  std::string backend = "http";
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = std::string(kDefaultApiKeyEnv);
  GenerationParams params;
  int ged_budget_ms = 10000;
  std::string output_dir;
  // Defaults to <output_dir>/cache.
  std::string cache_dir;
  std::string demo_bank;
  // Optional directory overriding the built-in templates.
  std::string templates_dir;
  int workers = 4;
  int max_in_flight = 4;
  // Evaluate only the first `limit` scenarios (0 = all).
  std::size_t limit = 0;
  LabelScheme label_scheme = LabelScheme::kSeededRandom;
  InvalidComponents invalid_components = InvalidComponents::kZero;
  ConsistencyPooling pooling = ConsistencyPooling::kPerScenario;

  nlohmann::json ToJson() const;
  static ExperimentConfig FromJson(const nlohmann::json& j);
  static ExperimentConfig Load(const std::filesystem::path& path);

  bool IsRandom() const { return method == kRandomMethod; }
  NarrativeKey EffectiveNarrativeKey() const;
  // The cache directory for this backend: see BackendCacheDir.
  std::filesystem::path CacheDir() const;
  // Throws Error on an inconsistent config.
  void Validate() const;
  // Validate() plus the paths a full run needs.
  void ValidateForRun() const;
};

// Mock completions live in base/mock-<policy> so they never answer for a
// real model with the same tag. HTTP backends use base itself.
std::filesystem::path BackendCacheDir(const std::filesystem::path& base,
                                      const std::string& backend);

// The baseline: events chained in presentation order.
TemporalGraph RandomBaseline(const std::vector<EventId>& presentation_order);

// The presentation order of one shuffle.
std::vector<EventId> ShuffleOrder(const Scenario& s, std::uint64_t master_seed,
                                  int shuffle);
// Label assignment shared by every shuffle of a scenario.
LabelAssignment ScenarioLabels(const Scenario& s, const ExperimentConfig& config);

struct PredictionRecord {
  std::string scenario_id;
  int shuffle = 0;
  std::string request_key;
  std::vector<EventId> order;
  std::vector<Relation> relations;  // label space, as parsed
  std::vector<Edge> edges;          // event space, canonical
  std::optional<std::string> narrative;
  bool valid = false;
  std::vector<std::string> diagnostics;

  nlohmann::json ToJson() const;
  static PredictionRecord FromJson(const nlohmann::json& j);
};

struct ScenarioFailure {
  std::string scenario_id;
  std::string error;
};

struct RunResult {
  std::vector<ScoreCard> cards;
  std::vector<PredictionRecord> outputs;
  std::vector<ScenarioFailure> failures;
  ReportRow row;
  ClientStats stats;
};

// Builds a backend from config: HttpBackend, or a MockBackend whose
// registry is registry.
std::shared_ptr<ChatBackend> MakeBackend(const ExperimentConfig& config,
                                         std::vector<Scenario> registry);

// Scores every scenario; results do not depend on config.workers.
// Endpoint failures are recorded per scenario and excluded from the report.
// With client null, one is built from config.
RunResult EvaluateScenarios(const ExperimentConfig& config,
                            const std::vector<Scenario>& scenarios,
                            const DemoBank* bank,
                            std::shared_ptr<LlmClient> client);

// Loads inputs, evaluates and writes the results directory.
RunResult RunExperiment(const ExperimentConfig& config);

// One run per shot count into <output_dir>/shots-<k>.
std::vector<ReportRow> RunShotSweep(const ExperimentConfig& config,
                                    const std::vector<int>& shots);
inline const std::vector<int> kDefaultShotSweep = {0, 1, 3, 5, 10};

struct OfflineScore {
  std::vector<ScoreCard> cards;
  ReportRow row;
};

// Rebuilds every prompt from the results directory's manifest and scores
// from the cache alone. Throws Error listing the scenarios with missing
// cache entries. budget_ms overrides the recorded GED budget.
OfflineScore ScoreOffline(const std::filesystem::path& results_dir,
                          std::optional<int> budget_ms = std::nullopt);

struct NarrativeGenerationSummary {
  std::size_t generated = 0;
  std::size_t skipped = 0;
  std::size_t refused = 0;
};

// Heuristic check for refusals and empty generations.
bool LooksLikeRefusal(std::string_view text);

// Fills bank narratives for every (entry, spec) under the key
// (params.model, spec). Existing usable narratives are kept, so a rerun
// issues no requests.
NarrativeGenerationSummary GenerateReferenceNarratives(
    DemoBank& bank, const std::vector<MetaPromptSpec>& specs,
    const GenerationParams& params, LlmClient& client,
    const Templates& templates = Templates::Default());

struct ReviewItem {
  std::string scenario_id;
  int shuffle = 0;
  std::string reason;
};

struct JudgeReport {
  std::array<std::size_t, kVerdictCount> counts{};
  std::size_t unparseable = 0;
  std::size_t sampled = 0;
  double alignment = 0;  // fraction of parsed verdicts
  std::vector<ReviewItem> review_queue;

  nlohmann::json ToJson() const;
  std::string Markdown() const;
};

// (yes + largely yes) / all parsed verdicts. Throws Error on zero total.
double Alignment(const std::array<std::size_t, kVerdictCount>& counts);

inline constexpr std::size_t kDefaultJudgeSample = 600;

// Samples up to sample_size outputs that carry a narrative (seeded by the
// run's master seed), asks the judge, and writes judge.json and judge.md.
JudgeReport JudgeFaithfulness(const std::filesystem::path& results_dir,
                              std::size_t sample_size,
                              const GenerationParams& judge_params,
                              LlmClient& client,
                              const Templates& templates = Templates::Default());

// Combines report.json rows of several results directories.
std::vector<ReportRow> CollectReports(const std::vector<std::filesystem::path>& dirs);

}  // namespace tgg

#endif  // TGG_RUNNER_H_
