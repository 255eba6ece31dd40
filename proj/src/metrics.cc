#include "tgg/metrics.h"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <sstream>

namespace tgg {

Prf PrecisionRecallF1(const EdgeSet& gold, const EdgeSet& pred) {
  if (gold.empty()) throw Error("gold edge set is empty");
  Prf out;
  if (pred.empty()) return out;
  std::size_t hit = 0;
  for (const auto& e : pred) hit += gold.count(e);
  out.precision = static_cast<double>(hit) / pred.size();
  out.recall = static_cast<double>(hit) / gold.size();
  if (out.precision + out.recall > 0) {
    out.f1 = 2 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

namespace {

double Jaccard(const EdgeSet& a, const EdgeSet& b) {
  std::size_t common = 0;
  for (const auto& e : a) common += b.count(e);
  const std::size_t unite = a.size() + b.size() - common;
  return unite == 0 ? 0.0 : static_cast<double>(common) / unite;
}

}  // namespace

double PairwiseConsistency(const std::vector<EdgeSet>& preds) {
  if (preds.size() < 2) {
    throw Error("pairwise consistency needs at least two graphs");
  }
  double sum = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = i + 1; j < preds.size(); ++j) {
      sum += Jaccard(preds[i], preds[j]);
      ++pairs;
    }
  }
  return sum / pairs;
}

EdgeSet ConsistencyEdges(const CanonicalGraph& pred) {
  return pred.valid ? pred.graph.edges() : EdgeSet{};
}

ScoreCard ScorePrediction(const Scenario& scenario, int shuffle,
                          const CanonicalGraph& pred,
                          const ScoringOptions& options) {
  ScoreCard card;
  card.scenario_id = scenario.id;
  card.shuffle = shuffle;
  card.valid = pred.valid;
  const EdgeSet gold = scenario.GoldEdgeSet();
  const EdgeSet predicted = ConsistencyEdges(pred);
  const Prf prf = PrecisionRecallF1(gold, predicted);
  card.precision = prf.precision;
  card.recall = prf.recall;
  card.f1 = prf.f1;
  card.edge_ratio = static_cast<double>(predicted.size()) / gold.size();
  card.components = WeakComponents(pred, options.invalid_components);
  const TemporalGraph compared = pred.valid ? pred.graph : TemporalGraph();
  const GedResult ged =
      GraphEditDistance(GoldGraph(scenario), compared, options.ged);
  card.ged = ged.value;
  card.ged_exact = ged.exact;
  return card;
}

ReportRow Aggregate(const std::string& dataset, const std::string& method,
                    const std::vector<ScoreCard>& cards,
                    const std::map<std::string, std::vector<EdgeSet>>& preds,
                    const AggregateOptions& options) {
  std::map<std::string, int> per_scenario;
  for (const auto& c : cards) ++per_scenario[c.scenario_id];
  std::vector<std::string> broken;
  for (const auto& [id, count] : per_scenario) {
    if (count != options.shuffles) broken.push_back(id);
  }
  for (const auto& [id, sets] : preds) {
    if (!per_scenario.count(id) ||
        static_cast<int>(sets.size()) != options.shuffles) {
      if (std::find(broken.begin(), broken.end(), id) == broken.end()) {
        broken.push_back(id);
      }
    }
  }
  if (!broken.empty()) {
    std::string msg = "scenarios without exactly " +
                      std::to_string(options.shuffles) + " shuffles:";
    for (const auto& id : broken) msg += " " + id;
    throw Error(msg);
  }
  if (cards.empty()) throw Error("no score cards to aggregate");

  ReportRow row;
  row.dataset = dataset;
  row.method = method;
  row.cards = cards.size();
  for (const auto& c : cards) {
    row.precision += c.precision;
    row.recall += c.recall;
    row.f1 += c.f1;
    row.ged += c.ged;
    row.edge_ratio += c.edge_ratio;
    row.components += static_cast<double>(c.components);
    row.inexact_ged += c.ged_exact ? 0 : 1;
  }
  const double n = static_cast<double>(cards.size());
  row.precision = 100 * row.precision / n;
  row.recall = 100 * row.recall / n;
  row.f1 = 100 * row.f1 / n;
  row.ged /= n;
  row.edge_ratio /= n;
  row.components /= n;

  if (options.shuffles >= 2 && !preds.empty()) {
    double sum = 0;
    std::size_t weight = 0;
    for (const auto& [id, sets] : preds) {
      const double c = PairwiseConsistency(sets);
      if (options.pooling == ConsistencyPooling::kPerScenario) {
        sum += c;
        ++weight;
      } else {
        const std::size_t pairs = sets.size() * (sets.size() - 1) / 2;
        sum += c * pairs;
        weight += pairs;
      }
    }
    row.consistency = 100 * sum / weight;
  }
  return row;
}

nlohmann::json ToJson(const ScoreCard& card) {
  return {
      {"scenario_id", card.scenario_id}, {"shuffle", card.shuffle},
      {"precision", card.precision},     {"recall", card.recall},
      {"f1", card.f1},                   {"ged", card.ged},
      {"ged_exact", card.ged_exact},     {"edge_ratio", card.edge_ratio},
      {"components", card.components},   {"valid", card.valid},
  };
}

ScoreCard CardFromJson(const nlohmann::json& j) {
  ScoreCard c;
  c.scenario_id = j.at("scenario_id").get<std::string>();
  c.shuffle = j.at("shuffle").get<int>();
  c.precision = j.at("precision").get<double>();
  c.recall = j.at("recall").get<double>();
  c.f1 = j.at("f1").get<double>();
  c.ged = j.at("ged").get<double>();
  c.ged_exact = j.at("ged_exact").get<bool>();
  c.edge_ratio = j.at("edge_ratio").get<double>();
  c.components = j.at("components").get<std::size_t>();
  c.valid = j.at("valid").get<bool>();
  return c;
}

std::string CardsToJsonl(const std::vector<ScoreCard>& cards) {
  std::string out;
  for (const auto& c : cards) {
    out += ToJson(c).dump();
    out += '\n';
  }
  return out;
}

std::vector<ScoreCard> CardsFromJsonl(const std::string& text) {
  std::vector<ScoreCard> cards;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    cards.push_back(CardFromJson(nlohmann::json::parse(line)));
  }
  return cards;
}

nlohmann::json ToJson(const ReportRow& row) {
  return {{"dataset", row.dataset},       {"method", row.method},
          {"precision", row.precision},   {"recall", row.recall},
          {"f1", row.f1},                 {"ged", row.ged},
          {"edge_ratio", row.edge_ratio}, {"components", row.components},
          {"consistency", row.consistency}, {"cards", row.cards},
          {"inexact_ged", row.inexact_ged}};
}

ReportRow RowFromJson(const nlohmann::json& j) {
  ReportRow r;
  r.dataset = j.at("dataset").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.ged = j.at("ged").get<double>();
  r.edge_ratio = j.at("edge_ratio").get<double>();
  r.components = j.at("components").get<double>();
  r.consistency = j.at("consistency").get<double>();
  r.cards = j.value("cards", std::size_t{0});
  r.inexact_ged = j.value("inexact_ged", std::size_t{0});
  return r;
}

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> Cells(const ReportRow& r) {
  return {r.dataset,          r.method,
          Fixed(r.precision, 1), Fixed(r.recall, 1),
          Fixed(r.f1, 1),        Fixed(r.ged, 2),
          Fixed(r.edge_ratio, 2), Fixed(r.components, 2),
          Fixed(r.consistency, 1)};
}

const std::vector<std::string> kHeader = {
    "Dataset", "Method", "P", "R", "F1", "GED", "|E_pred|/|E|", "k(G)",
    "Cons."};

}  // namespace

std::string ReportMarkdown(const std::vector<ReportRow>& rows) {
  auto line = [](const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + c + " |";
    return out + "\n";
  };
  std::string out = line(kHeader);
  out += "|---|---|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& r : rows) out += line(Cells(r));
  return out;
}

std::string ReportCsv(const std::vector<ReportRow>& rows) {
  auto line = [](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      const bool quote = cells[i].find_first_of(",\"") != std::string::npos;
      if (quote) {
        out += '"';
        for (char ch : cells[i]) {
          if (ch == '"') out += '"';
          out += ch;
        }
        out += '"';
      } else {
        out += cells[i];
      }
    }
    return out + "\n";
  };
  std::string out = line({"dataset", "method", "precision", "recall", "f1",
                          "ged", "edge_ratio", "components", "consistency"});
  for (const auto& r : rows) out += line(Cells(r));
  return out;
}

}  // namespace tgg
