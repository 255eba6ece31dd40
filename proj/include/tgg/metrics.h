// Semantic and structural scores for predicted temporal graphs.

#ifndef TGG_METRICS_H_
#define TGG_METRICS_H_

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tgg/ged.h"
#include "tgg/graph.h"

namespace tgg {

struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Throws Error when gold is empty.
Prf PrecisionRecallF1(const EdgeSet& gold, const EdgeSet& pred);

// Mean Jaccard overlap over all unordered pairs. A pair of empty sets
// scores 0. Throws Error for fewer than two graphs.
double PairwiseConsistency(const std::vector<EdgeSet>& preds);

struct ScoreCard {
  std::string scenario_id;
  int shuffle = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double ged = 0;
  bool ged_exact = true;
  double edge_ratio = 0;
  std::size_t components = 0;
  bool valid = false;

  bool operator==(const ScoreCard&) const = default;
};

struct ScoringOptions {
  GedOptions ged;
  InvalidComponents invalid_components = InvalidComponents::kZero;
};

// An invalid prediction scores F1 = 0, edge ratio = 0 and its GED is the
// distance from the empty graph (every gold node and edge inserted).
ScoreCard ScorePrediction(const Scenario& scenario, int shuffle,
                          const CanonicalGraph& pred,
                          const ScoringOptions& options = {});

// Edge set a prediction contributes to consistency (empty when invalid).
EdgeSet ConsistencyEdges(const CanonicalGraph& pred);

enum class ConsistencyPooling { kPerScenario, kPooled };

struct AggregateOptions {
  int shuffles = 3;
  ConsistencyPooling pooling = ConsistencyPooling::kPerScenario;
};

// Dataset-level means. Fractions are stored as percentages.
struct ReportRow {
  std::string dataset;
  std::string method;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double ged = 0;
  double edge_ratio = 0;
  double components = 0;
  double consistency = 0;
  std::size_t cards = 0;
  std::size_t inexact_ged = 0;
};

// preds maps scenario id to the per-shuffle edge sets of its predictions.
// Throws Error naming every scenario whose card count differs from
// options.shuffles.
ReportRow Aggregate(const std::string& dataset, const std::string& method,
                    const std::vector<ScoreCard>& cards,
                    const std::map<std::string, std::vector<EdgeSet>>& preds,
                    const AggregateOptions& options = {});

nlohmann::json ToJson(const ScoreCard& card);
ScoreCard CardFromJson(const nlohmann::json& j);
// One compact JSON object per line.
std::string CardsToJsonl(const std::vector<ScoreCard>& cards);
std::vector<ScoreCard> CardsFromJsonl(const std::string& text);

nlohmann::json ToJson(const ReportRow& row);
ReportRow RowFromJson(const nlohmann::json& j);

// Columns: P, R, F1, GED, edge ratio, k(G), consistency.
std::string ReportMarkdown(const std::vector<ReportRow>& rows);
std::string ReportCsv(const std::vector<ReportRow>& rows);

}  // namespace tgg

#endif  // TGG_METRICS_H_
