#include "tgg/datasets.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace tgg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string ReadText(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string TrimCopy(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Every JSON record in a .json (array or single object) or .jsonl file.
std::vector<json> ReadRecords(const fs::path& p) {
  std::vector<json> out;
  const std::string text = ReadText(p);
  const std::string head = TrimCopy(text.substr(0, 64));
  if (p.extension() == ".json" && !head.empty() && head[0] == '[') {
    for (auto& r : json::parse(text)) out.push_back(std::move(r));
    return out;
  }
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (TrimCopy(line).empty()) continue;
    out.push_back(json::parse(line));
  }
  return out;
}

std::vector<fs::path> InputFiles(const fs::path& path) {
  if (!fs::exists(path)) throw Error("no such corpus path: " + path.string());
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".jsonl" || ext == ".json")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

Split SplitFromName(const fs::path& p) {
  return p.filename().string().find("train") != std::string::npos
             ? Split::kTrain
             : Split::kEval;
}

// "step3" and "3" name the same ProScript node.
std::string NodeKey(std::string s) {
  s = TrimCopy(s);
  if (s.rfind("step", 0) == 0) s = s.substr(4);
  return s;
}

std::size_t WordCount(std::string_view s) {
  std::size_t words = 0;
  bool in_word = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  return words;
}

bool Truthy(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return v.get<double>() != 0;
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s == "true" || s == "yes" || s == "1" || s == "ordered";
  }
  return false;
}

}  // namespace

json ToJson(const Scenario& s) {
  json events = json::array();
  for (const auto& e : s.events) {
    events.push_back({{"id", e.id}, {"description", e.description}});
  }
  json edges = json::array();
  for (const auto& e : s.gold_edges) edges.push_back({e.from, e.to});
  return {{"id", s.id},
          {"title", s.title},
          {"events", events},
          {"edges", edges},
          {"domain", std::string(DomainName(s.domain))},
          {"split", std::string(SplitName(s.split))}};
}

Scenario ScenarioFromJson(const json& j) {
  Scenario s;
  s.id = j.at("id").get<std::string>();
  s.title = j.at("title").get<std::string>();
  for (const auto& e : j.at("events")) {
    s.events.push_back({e.at("id").get<std::string>(),
                        e.at("description").get<std::string>()});
  }
  for (const auto& e : j.at("edges")) {
    s.gold_edges.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
  }
  s.domain = ParseDomain(j.value("domain", "daily"));
  s.split = ParseSplit(j.value("split", "eval"));
  return s;
}

std::string ScenariosToJsonl(const std::vector<Scenario>& scenarios) {
  std::string out;
  for (const auto& s : scenarios) out += ToJson(s).dump() + "\n";
  return out;
}

std::vector<Scenario> ScenariosFromJsonl(const std::string& text) {
  std::vector<Scenario> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (TrimCopy(line).empty()) continue;
    out.push_back(ScenarioFromJson(json::parse(line)));
  }
  return out;
}

std::vector<Scenario> ReadScenarios(const fs::path& path) {
  auto scenarios = ScenariosFromJsonl(ReadText(path));
  for (const auto& s : scenarios) ValidateScenario(s);
  return scenarios;
}

void WriteScenarios(const fs::path& path, const std::vector<Scenario>& scenarios) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << ScenariosToJsonl(scenarios);
}

namespace {

Scenario ProscriptRecord(const json& r, const std::string& fallback_id,
                         Split split) {
  if (r.contains("events") && r.at("events").is_array()) {
    return ScenarioFromJson(r);
  }
  Scenario s;
  s.id = r.contains("id") ? r.at("id").dump() : fallback_id;
  if (r.contains("id") && r.at("id").is_string()) s.id = r.at("id").get<std::string>();
  s.title = TrimCopy(r.at("scenario").get<std::string>());
  s.domain = Domain::kDaily;
  s.split = r.contains("split") ? ParseSplit(r.at("split").get<std::string>()) : split;

  std::map<std::string, std::string> key_to_id;
  auto add_event = [&](const std::string& key, const std::string& text) {
    const std::string k = NodeKey(key);
    if (key_to_id.count(k)) return;
    key_to_id[k] = k;
    s.events.push_back({k, TrimCopy(text)});
  };
  if (r.contains("events") && r.at("events").is_object()) {
    std::vector<std::pair<std::string, std::string>> items;
    for (auto it = r.at("events").begin(); it != r.at("events").end(); ++it) {
      items.emplace_back(it.key(), it.value().get<std::string>());
    }
    // Numeric keys sort numerically.
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      auto num = [](const std::string& k) {
        const std::string n = NodeKey(k);
        return !n.empty() && std::all_of(n.begin(), n.end(), ::isdigit)
                   ? std::stol(n)
                   : -1L;
      };
      return num(a.first) < num(b.first);
    });
    for (const auto& [k, v] : items) add_event(k, v);
  } else if (r.contains("flatten_input_for_edge_prediction")) {
    static const std::regex kStep(R"((step\w+)\s*:\s*([^;]+))");
    const std::string flat = r.at("flatten_input_for_edge_prediction").get<std::string>();
    for (std::sregex_iterator it(flat.begin(), flat.end(), kStep), end; it != end; ++it) {
      add_event((*it)[1].str(), (*it)[2].str());
    }
  }

  std::vector<std::string> raw_edges;
  if (r.contains("gold_edges_for_prediction")) {
    for (const auto& e : r.at("gold_edges_for_prediction")) {
      raw_edges.push_back(e.get<std::string>());
    }
  } else if (r.contains("flatten_output_for_edge_prediction")) {
    std::string flat = r.at("flatten_output_for_edge_prediction").get<std::string>();
    std::stringstream ss(flat);
    std::string part;
    while (std::getline(ss, part, ';')) raw_edges.push_back(part);
  } else if (r.contains("edges")) {
    for (const auto& e : r.at("edges")) {
      raw_edges.push_back(e.is_array() ? e.at(0).get<std::string>() + "->" +
                                             e.at(1).get<std::string>()
                                       : e.get<std::string>());
    }
  }
  std::set<Edge> seen;
  for (const auto& raw : raw_edges) {
    auto arrow = raw.find("->");
    if (arrow == std::string::npos) {
      if (TrimCopy(raw).empty()) continue;
      throw Error("malformed edge '" + raw + "'");
    }
    Edge e{NodeKey(raw.substr(0, arrow)), NodeKey(raw.substr(arrow + 2))};
    if (!key_to_id.count(e.from) || !key_to_id.count(e.to)) {
      throw Error("edge '" + raw + "' references an unknown step");
    }
    if (seen.insert(e).second) s.gold_edges.push_back(e);
  }
  return s;
}

}  // namespace

std::vector<Scenario> LoadProscript(const fs::path& path, LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  std::vector<Scenario> out;
  for (const auto& file : InputFiles(path)) {
    const Split split = SplitFromName(file);
    const auto records = ReadRecords(file);
    for (std::size_t i = 0; i < records.size(); ++i) {
      ++rep.read;
      const std::string fallback =
          file.stem().string() + "-" + std::to_string(i);
      try {
        Scenario s = ProscriptRecord(records[i], fallback, split);
        ValidateScenario(s);
        out.push_back(std::move(s));
      } catch (const std::exception& e) {
        rep.rejected.push_back(fallback + ": " + e.what());
      }
    }
  }
  return out;
}

std::vector<Scenario> LoadSchema11(const fs::path& path) {
  std::vector<Scenario> out;
  for (const auto& file : InputFiles(path)) {
    for (const auto& r : ReadRecords(file)) {
      Scenario s = ScenarioFromJson(r);
      s.domain = Domain::kNews;
      ValidateScenario(s);
      out.push_back(std::move(s));
    }
  }
  if (out.size() != 11) {
    throw Error("Schema-11 must contain exactly 11 scenarios, found " +
                std::to_string(out.size()));
  }
  return out;
}

std::vector<Scenario> LoadWikihow(const fs::path& path, LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  std::vector<Scenario> out;
  for (const auto& file : InputFiles(path)) {
    const auto records = ReadRecords(file);
    for (std::size_t i = 0; i < records.size(); ++i) {
      const json& r = records[i];
      ++rep.read;
      std::string id = file.stem().string() + "-" + std::to_string(i);
      if (r.contains("id")) {
        id = r.at("id").is_string() ? r.at("id").get<std::string>() : r.at("id").dump();
      }
      auto reject = [&](const std::string& why) {
        rep.rejected.push_back(id + ": " + why);
      };
      for (const char* key : {"lang", "language"}) {
        if (r.contains(key)) {
          std::string lang = r.at(key).get<std::string>();
          for (auto& c : lang) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
          if (lang != "en" && lang != "english") {
            reject("not English");
            goto next;
          }
        }
      }
      {
        const json* flag = nullptr;
        for (const char* key : {"ordered", "is_ordered"}) {
          if (r.contains(key)) flag = &r.at(key);
        }
        if (!flag || !Truthy(*flag)) {
          reject("not an ordered article");
          continue;
        }
        if (!r.contains("steps") || !r.at("steps").is_array()) {
          reject("no steps");
          continue;
        }
        std::vector<std::string> steps;
        for (const auto& st : r.at("steps")) {
          std::string text;
          if (st.is_string()) {
            text = st.get<std::string>();
          } else {
            for (const char* key : {"headline", "step", "text", "description"}) {
              if (st.contains(key)) {
                text = st.at(key).get<std::string>();
                break;
              }
            }
          }
          text = TrimCopy(text);
          if (!text.empty()) steps.push_back(text);
        }
        if (steps.size() < 2) {
          reject("fewer than 2 steps");
          continue;
        }
        if (steps.size() > kWikihowMaxSteps) {
          reject("more than 20 steps");
          continue;
        }
        Scenario s;
        s.id = id;
        s.title = TrimCopy(r.contains("title") ? r.at("title").get<std::string>()
                                               : r.value("goal", ""));
        s.domain = Domain::kDaily;
        s.split = Split::kEval;
        for (std::size_t k = 0; k < steps.size(); ++k) {
          s.events.push_back({"s" + std::to_string(k + 1), steps[k]});
          if (k) s.gold_edges.push_back({s.events[k - 1].id, s.events[k].id});
        }
        try {
          ValidateScenario(s);
        } catch (const Error& e) {
          reject(e.what());
          continue;
        }
        out.push_back(std::move(s));
      }
    next:;
    }
  }
  return out;
}

CorpusManifest ComputeManifest(const std::string& dataset,
                               const std::string& source,
                               const std::vector<Scenario>& scenarios) {
  CorpusManifest m;
  m.dataset = dataset;
  m.source = source;
  m.scenarios = scenarios.size();
  std::size_t events = 0, edges = 0, words = 0, nonlinear = 0;
  for (const auto& s : scenarios) {
    events += s.events.size();
    edges += s.gold_edges.size();
    m.max_events = std::max(m.max_events, s.events.size());
    for (const auto& e : s.events) words += WordCount(e.description);
    if (HasBranch(GoldGraph(s))) ++nonlinear;
  }
  if (!scenarios.empty()) {
    const double n = static_cast<double>(scenarios.size());
    m.mean_events = events / n;
    m.mean_edges = edges / n;
    m.percent_nonlinear = 100.0 * nonlinear / n;
  }
  if (events) m.mean_event_words = static_cast<double>(words) / events;
  if (dataset == "wikihow") {
    m.notes.push_back(
        "the published processing notes state the step cap reduces the corpus "
        "to 2,077 articles while the published statistics table lists 2,991; "
        "the table value is used as the reference");
  }
  return m;
}

json ToJson(const CorpusManifest& m) {
  return {{"dataset", m.dataset},
          {"source", m.source},
          {"scenarios", m.scenarios},
          {"mean_events", m.mean_events},
          {"max_events", m.max_events},
          {"mean_edges", m.mean_edges},
          {"mean_event_words", m.mean_event_words},
          {"percent_nonlinear", m.percent_nonlinear},
          {"notes", m.notes}};
}

const std::vector<ReferenceStats>& PublishedStats() {
  static const std::vector<ReferenceStats> kStats = {
      {"proscript", 2077, 7.46, 9, 6.95, 4.64, 39},
      {"schema11", 11, 7.91, 11, 7.18, 3.48, 27},
      {"wikihow", 2991, 8.37, 20, 7.37, 9.63, 0},
  };
  return kStats;
}

const ReferenceStats& PublishedStatsFor(const std::string& dataset) {
  for (const auto& s : PublishedStats()) {
    if (s.dataset == dataset) return s;
  }
  throw Error("no published statistics for " + dataset);
}

std::vector<ManifestCheck> CheckManifest(const CorpusManifest& m) {
  const ReferenceStats& ref = PublishedStatsFor(m.dataset);
  std::vector<ManifestCheck> checks;
  auto check = [&](std::string what, double expected, double actual, double tol) {
    checks.push_back({std::move(what), expected, actual, tol,
                      std::fabs(expected - actual) <= tol + 1e-12});
  };
  if (m.dataset == "proscript") {
    check("scenarios", ref.scenarios, m.scenarios, 0);
    check("mean events", ref.mean_events, m.mean_events, 0.01);
  } else if (m.dataset == "schema11") {
    check("scenarios", ref.scenarios, m.scenarios, 0);
    check("mean edges", ref.mean_edges, m.mean_edges, 0.01);
    // Percentages are published rounded to whole numbers.
    check("percent non-linear", ref.percent_nonlinear, m.percent_nonlinear, 0.5);
  } else if (m.dataset == "wikihow") {
    check("percent non-linear", ref.percent_nonlinear, m.percent_nonlinear, 0);
    check("max events", ref.max_events, m.max_events, 0);
  }
  return checks;
}

double LinearChainEdgeRatio(double mean_events, double mean_edges) {
  return (mean_events - 1) / mean_edges;
}

json DemoBank::ToJson() const {
  json demos = json::array();
  for (const auto& e : entries) {
    json entry = {{"scenario", tgg::ToJson(e.scenario)},
                  {"narratives", e.narratives}};
    if (!e.unusable.empty()) entry["unusable"] = e.unusable;
    demos.push_back(entry);
  }
  return {{"demos", demos}};
}

DemoBank DemoBank::FromJson(const json& j) {
  DemoBank bank;
  for (const auto& d : j.at("demos")) {
    BankEntry e;
    e.scenario = ScenarioFromJson(d.at("scenario"));
    if (d.contains("narratives")) {
      e.narratives = d.at("narratives").get<std::map<std::string, std::string>>();
    }
    if (d.contains("unusable")) {
      e.unusable = d.at("unusable").get<std::set<std::string>>();
    }
    bank.entries.push_back(std::move(e));
  }
  return bank;
}

DemoBank DemoBank::Load(const fs::path& path) {
  DemoBank bank = FromJson(json::parse(ReadText(path)));
  bank.Validate();
  return bank;
}

void DemoBank::Save(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << ToJson().dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

void DemoBank::Validate() const {
  if (entries.size() != kDemoBankSize) {
    throw Error("demo bank must hold " + std::to_string(kDemoBankSize) +
                " demonstrations, found " + std::to_string(entries.size()));
  }
  bool nonlinear = false;
  for (const auto& e : entries) {
    ValidateScenario(e.scenario);
    if (e.scenario.split != Split::kTrain) {
      throw Error("demo " + e.scenario.id + " is not from the training split");
    }
    if (e.scenario.gold_edges.empty()) {
      throw Error("demo " + e.scenario.id + " has no gold edges");
    }
    nonlinear = nonlinear || HasBranch(GoldGraph(e.scenario));
  }
  if (!nonlinear) throw Error("demo bank has no non-linear temporal graph");
}

std::vector<Demonstration> SelectDemos(const DemoBank& bank, int shots,
                                       const std::optional<NarrativeKey>& key) {
  if (shots < 0 || static_cast<std::size_t>(shots) > bank.entries.size()) {
    throw Error("shots must be between 0 and " +
                std::to_string(bank.entries.size()));
  }
  std::vector<Demonstration> out;
  std::vector<std::string> missing;
  for (int i = 0; i < shots; ++i) {
    const BankEntry& e = bank.entries[i];
    Demonstration d;
    d.scenario = e.scenario;
    if (key) {
      const std::string k = key->ToString();
      auto it = e.narratives.find(k);
      if (it == e.narratives.end() || e.unusable.count(k)) {
        missing.push_back(e.scenario.id);
      } else {
        d.reference_narrative = it->second;
        d.narrative_key = key;
      }
    }
    out.push_back(std::move(d));
  }
  if (!missing.empty()) {
    std::string msg = "no usable " + key->ToString() + " narrative for:";
    for (const auto& id : missing) msg += " " + id;
    throw Error(msg);
  }
  return out;
}

}  // namespace tgg
