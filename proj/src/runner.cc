#include "tgg/runner.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "tgg/seeding.h"

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

void WriteText(const fs::path& p, std::string_view text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, p);
}

std::string FileHash(const std::string& path) {
  return path.empty() ? "" : Sha256Hex(ReadText(path));
}

std::string_view LabelSchemeName(LabelScheme s) {
  return s == LabelScheme::kSeededRandom ? "seeded_random" : "dataset_order";
}

LabelScheme ParseLabelScheme(std::string_view s) {
  if (s == "seeded_random") return LabelScheme::kSeededRandom;
  if (s == "dataset_order") return LabelScheme::kDatasetOrder;
  throw Error("unknown label scheme: " + std::string(s));
}

std::string_view InvalidComponentsName(InvalidComponents c) {
  return c == InvalidComponents::kZero ? "zero" : "node_count";
}

InvalidComponents ParseInvalidComponents(std::string_view s) {
  if (s == "zero") return InvalidComponents::kZero;
  if (s == "node_count") return InvalidComponents::kNodeCount;
  throw Error("unknown invalid-components convention: " + std::string(s));
}

std::string_view PoolingName(ConsistencyPooling p) {
  return p == ConsistencyPooling::kPerScenario ? "per_scenario" : "pooled";
}

ConsistencyPooling ParsePooling(std::string_view s) {
  if (s == "per_scenario") return ConsistencyPooling::kPerScenario;
  if (s == "pooled") return ConsistencyPooling::kPooled;
  throw Error("unknown consistency pooling: " + std::string(s));
}

std::string AbsoluteOrEmpty(const std::string& p) {
  return p.empty() ? p : fs::absolute(p).lexically_normal().string();
}

std::string SafeFileName(const std::string& id) {
  std::string out;
  for (unsigned char c : id) {
    out += std::isalnum(c) || c == '-' || c == '_' || c == '.' ? static_cast<char>(c) : '_';
  }
  return out;
}

Templates LoadTemplates(const ExperimentConfig& config) {
  return config.templates_dir.empty() ? Templates::Default()
                                      : Templates::Load(config.templates_dir);
}

std::vector<Scenario> LoadScenarios(const ExperimentConfig& config) {
  auto scenarios = ReadScenarios(config.data_path);
  if (config.limit && scenarios.size() > config.limit) scenarios.resize(config.limit);
  return scenarios;
}

std::optional<DemoBank> LoadBank(const ExperimentConfig& config) {
  if (config.demo_bank.empty()) return std::nullopt;
  return DemoBank::Load(config.demo_bank);
}

std::shared_ptr<LlmClient> MakeClient(const ExperimentConfig& config,
                                      std::shared_ptr<ChatBackend> backend,
                                      bool cache_only) {
  ClientOptions opts;
  opts.max_in_flight = config.max_in_flight;
  opts.cache_only = cache_only;
  return std::make_shared<LlmClient>(
      std::move(backend), std::make_shared<ResponseCache>(config.CacheDir()), opts);
}

std::vector<Scenario> Registry(const std::vector<Scenario>& scenarios,
                               const DemoBank* bank) {
  std::vector<Scenario> registry = scenarios;
  if (bank) {
    for (const auto& e : bank->entries) registry.push_back(e.scenario);
  }
  return registry;
}

struct ScenarioOutcome {
  std::vector<ScoreCard> cards;
  std::vector<PredictionRecord> outputs;
  std::vector<EdgeSet> consistency;
  std::optional<std::string> error;
};

}  // namespace

json ExperimentConfig::ToJson() const {
  json j = {{"dataset", dataset},
            {"data_path", data_path},
            {"method", method},
            {"shots", shots},
            {"input_format", std::string(InputFormatName(input_format))},
            {"use_references", use_references},
            {"shuffles", shuffles},
            {"master_seed", master_seed},
            {"backend", backend},
            {"base_url", base_url},
            {"api_key_env", api_key_env},
            {"params", params.ToJson()},
            {"ged_budget_ms", ged_budget_ms},
            {"output_dir", output_dir},
            {"cache_dir", cache_dir},
            {"demo_bank", demo_bank},
            {"templates_dir", templates_dir},
            {"workers", workers},
            {"max_in_flight", max_in_flight},
            {"limit", limit},
            {"label_scheme", std::string(LabelSchemeName(label_scheme))},
            {"invalid_components", std::string(InvalidComponentsName(invalid_components))},
            {"consistency_pooling", std::string(PoolingName(pooling))}};
  j["narrative_key"] = narrative_key ? json(narrative_key->ToString()) : json(nullptr);
  return j;
}

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  static const std::set<std::string> kKnown = {
      "dataset", "data_path", "method", "shots", "input_format", "use_references",
      "shuffles", "master_seed", "backend", "base_url", "api_key_env", "params",
      "ged_budget_ms", "output_dir", "cache_dir", "demo_bank", "templates_dir",
      "workers", "max_in_flight", "limit", "label_scheme", "invalid_components",
      "consistency_pooling", "narrative_key"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKnown.count(it.key())) throw Error("unknown config field: " + it.key());
  }
  ExperimentConfig c;
  c.dataset = j.value("dataset", c.dataset);
  c.data_path = j.value("data_path", c.data_path);
  c.method = j.value("method", c.method);
  c.shots = j.value("shots", c.shots);
  c.input_format = ParseInputFormat(j.value("input_format", "alphabetical"));
  c.use_references = j.value("use_references", c.use_references);
  c.shuffles = j.value("shuffles", c.shuffles);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.backend = j.value("backend", c.backend);
  c.base_url = j.value("base_url", c.base_url);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  if (j.contains("params")) c.params = GenerationParams::FromJson(j.at("params"));
  c.ged_budget_ms = j.value("ged_budget_ms", c.ged_budget_ms);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.cache_dir = j.value("cache_dir", c.cache_dir);
  c.demo_bank = j.value("demo_bank", c.demo_bank);
  c.templates_dir = j.value("templates_dir", c.templates_dir);
  c.workers = j.value("workers", c.workers);
  c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  c.limit = j.value("limit", c.limit);
  c.label_scheme = ParseLabelScheme(j.value("label_scheme", "seeded_random"));
  c.invalid_components = ParseInvalidComponents(j.value("invalid_components", "zero"));
  c.pooling = ParsePooling(j.value("consistency_pooling", "per_scenario"));
  if (j.contains("narrative_key") && j.at("narrative_key").is_string()) {
    c.narrative_key = NarrativeKey::Parse(j.at("narrative_key").get<std::string>());
  }
  return c;
}

ExperimentConfig ExperimentConfig::Load(const fs::path& path) {
  return FromJson(json::parse(ReadText(path)));
}

NarrativeKey ExperimentConfig::EffectiveNarrativeKey() const {
  if (narrative_key) return *narrative_key;
  return {"gpt-4", InstructionType::kSimpleReport, input_format};
}

fs::path BackendCacheDir(const fs::path& base, const std::string& backend) {
  if (backend.rfind("mock:", 0) == 0) return base / ("mock-" + backend.substr(5));
  return base;
}

fs::path ExperimentConfig::CacheDir() const {
  return BackendCacheDir(cache_dir.empty() ? fs::path(output_dir) / "cache" : fs::path(cache_dir),
                         backend);
}

void ExperimentConfig::Validate() const {
  if (method != kRandomMethod) ParseMethod(method);
  if (shuffles < 2) throw Error("consistency needs at least 2 shuffles");
  if (shots < 0 || static_cast<std::size_t>(shots) > kDemoBankSize) {
    throw Error("shots must be between 0 and 15");
  }
  if (backend != "http" && backend.rfind("mock:", 0) != 0) {
    throw Error("backend must be http or mock:<policy>");
  }
  if (backend.rfind("mock:", 0) == 0) ParseMockPolicy(backend.substr(5));
  if (workers < 1 || max_in_flight < 1) throw Error("workers and max_in_flight must be positive");
  if (ged_budget_ms <= 0) throw Error("ged_budget_ms must be positive");
}

void ExperimentConfig::ValidateForRun() const {
  Validate();
  if (data_path.empty()) throw Error("config needs data_path");
  if (output_dir.empty()) throw Error("config needs output_dir");
  if (!IsRandom() && shots > 0 && demo_bank.empty()) {
    throw Error("config needs demo_bank for few-shot prompts");
  }
}

TemporalGraph RandomBaseline(const std::vector<EventId>& presentation_order) {
  return LinearChain(presentation_order);
}

std::vector<EventId> ShuffleOrder(const Scenario& s, std::uint64_t master_seed,
                                  int shuffle) {
  auto order = s.EventIds();
  Rng(DeriveSeed(master_seed, s.id, "shuffle", static_cast<std::uint64_t>(shuffle)))
      .Shuffle(order);
  return order;
}

LabelAssignment ScenarioLabels(const Scenario& s, const ExperimentConfig& config) {
  return AssignLabels(s, DeriveSeed(config.master_seed, s.id, "labels"),
                      config.input_format, config.label_scheme);
}

json PredictionRecord::ToJson() const {
  json rels = json::array();
  for (const auto& [a, b] : relations) rels.push_back({a, b});
  json es = json::array();
  for (const auto& e : edges) es.push_back({e.from, e.to});
  json j = {{"scenario_id", scenario_id},
            {"shuffle", shuffle},
            {"request_key", request_key},
            {"order", order},
            {"relations", rels},
            {"edges", es},
            {"valid", valid},
            {"diagnostics", diagnostics}};
  j["narrative"] = narrative ? json(*narrative) : json(nullptr);
  return j;
}

PredictionRecord PredictionRecord::FromJson(const json& j) {
  PredictionRecord r;
  r.scenario_id = j.at("scenario_id").get<std::string>();
  r.shuffle = j.at("shuffle").get<int>();
  r.request_key = j.value("request_key", "");
  r.order = j.at("order").get<std::vector<EventId>>();
  for (const auto& p : j.at("relations")) {
    r.relations.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
  }
  for (const auto& e : j.at("edges")) {
    r.edges.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
  }
  if (j.contains("narrative") && j.at("narrative").is_string()) {
    r.narrative = j.at("narrative").get<std::string>();
  }
  r.valid = j.at("valid").get<bool>();
  r.diagnostics = j.value("diagnostics", std::vector<std::string>{});
  return r;
}

std::shared_ptr<ChatBackend> MakeBackend(const ExperimentConfig& config,
                                         std::vector<Scenario> registry) {
  if (config.backend == "http") {
    HttpBackendOptions opts;
    opts.base_url = config.base_url;
    opts.api_key_env = config.api_key_env;
    return std::make_shared<HttpBackend>(opts);
  }
  return std::make_shared<MockBackend>(ParseMockPolicy(config.backend.substr(5)),
                                       std::move(registry));
}

RunResult EvaluateScenarios(const ExperimentConfig& config,
                            const std::vector<Scenario>& scenarios,
                            const DemoBank* bank,
                            std::shared_ptr<LlmClient> client) {
  config.Validate();
  const Templates templates = LoadTemplates(config);
  std::vector<Demonstration> demos;
  std::optional<Method> method;
  if (!config.IsRandom()) {
    method = ParseMethod(config.method);
    const bool needs_narratives =
        *method == Method::kNot && config.use_references && config.shots > 0;
    if (config.shots > 0) {
      if (!bank) throw Error("few-shot prompts need a demo bank");
      demos = SelectDemos(*bank, config.shots,
                          needs_narratives
                              ? std::optional<NarrativeKey>(config.EffectiveNarrativeKey())
                              : std::nullopt);
    }
    if (!client) {
      if (config.cache_dir.empty() && config.output_dir.empty()) {
        throw Error("config needs cache_dir or output_dir to build a client");
      }
      client = MakeClient(config, MakeBackend(config, Registry(scenarios, bank)), false);
    }
  }
  ScoringOptions scoring;
  scoring.ged.budget = std::chrono::milliseconds(config.ged_budget_ms);
  scoring.invalid_components = config.invalid_components;

  auto process = [&](const Scenario& s) {
    ScenarioOutcome out;
    try {
      const LabelAssignment labels = ScenarioLabels(s, config);
      const auto ids = s.EventIds();
      for (int k = 0; k < config.shuffles; ++k) {
        PredictionRecord rec;
        rec.scenario_id = s.id;
        rec.shuffle = k;
        rec.order = ShuffleOrder(s, config.master_seed, k);
        ModelOutput parsed;
        if (!method) {
          parsed.relations = RelationsInLabelSpace(RandomBaseline(rec.order), labels);
          parsed.valid = !parsed.relations.empty();
        } else {
          PromptBundle bundle = BuildPrompt(*method, demos, s, labels, rec.order,
                                            config.shots, config.use_references,
                                            templates);
          bundle.shuffle_seed =
              DeriveSeed(config.master_seed, s.id, "shuffle", static_cast<std::uint64_t>(k));
          rec.request_key = ChatRequest{bundle.messages, config.params}.Key();
          parsed = ParseCompletion(client->Complete(bundle, config.params));
        }
        const CanonicalGraph canon = Canonicalize(parsed.relations, labels, ids);
        rec.relations = parsed.relations;
        rec.edges.assign(canon.graph.edges().begin(), canon.graph.edges().end());
        rec.narrative = parsed.narrative;
        rec.valid = canon.valid;
        rec.diagnostics = parsed.diagnostics;
        for (const auto& u : canon.unknown_labels) {
          rec.diagnostics.push_back("unknown label " + u);
        }
        out.cards.push_back(ScorePrediction(s, k, canon, scoring));
        out.consistency.push_back(ConsistencyEdges(canon));
        out.outputs.push_back(std::move(rec));
      }
    } catch (const std::exception& e) {
      out = ScenarioOutcome{};
      out.error = e.what();
    }
    return out;
  };

  std::vector<ScenarioOutcome> slots(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < scenarios.size();) {
      slots[i] = process(scenarios[i]);
    }
  };
  const int workers = std::min<int>(config.workers, std::max<std::size_t>(1, scenarios.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  RunResult result;
  std::map<std::string, std::vector<EdgeSet>> preds;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    auto& slot = slots[i];
    if (slot.error) {
      result.failures.push_back({scenarios[i].id, *slot.error});
      continue;
    }
    result.cards.insert(result.cards.end(), slot.cards.begin(), slot.cards.end());
    result.outputs.insert(result.outputs.end(), slot.outputs.begin(), slot.outputs.end());
    preds[scenarios[i].id] = std::move(slot.consistency);
  }
  if (!result.cards.empty()) {
    AggregateOptions agg;
    agg.shuffles = config.shuffles;
    agg.pooling = config.pooling;
    result.row = Aggregate(config.dataset, config.method, result.cards, preds, agg);
  } else {
    result.row.dataset = config.dataset;
    result.row.method = config.method;
  }
  if (client) result.stats = client->stats();
  return result;
}

RunResult RunExperiment(const ExperimentConfig& input) {
  ExperimentConfig config = input;
  config.ValidateForRun();
  config.data_path = AbsoluteOrEmpty(config.data_path);
  config.demo_bank = AbsoluteOrEmpty(config.demo_bank);
  config.templates_dir = AbsoluteOrEmpty(config.templates_dir);
  if (config.cache_dir.empty()) config.cache_dir = (fs::path(config.output_dir) / "cache").string();
  config.cache_dir = AbsoluteOrEmpty(config.cache_dir);
  config.output_dir = AbsoluteOrEmpty(config.output_dir);

  const auto scenarios = LoadScenarios(config);
  const auto bank = config.IsRandom() ? std::nullopt : LoadBank(config);
  RunResult result = EvaluateScenarios(config, scenarios, bank ? &*bank : nullptr, nullptr);

  const fs::path out(config.output_dir);
  fs::create_directories(out);
  WriteText(out / "cards.jsonl", CardsToJsonl(result.cards));
  std::string outputs;
  for (const auto& r : result.outputs) outputs += r.ToJson().dump() + "\n";
  WriteText(out / "outputs.jsonl", outputs);
  if (!config.IsRandom()) {
    const ResponseCache cache(config.CacheDir());
    for (const auto& r : result.outputs) {
      json link = {{"key", r.request_key},
                   {"cache_file", cache.PathFor(r.request_key).string()}};
      WriteText(out / "raw" / (SafeFileName(r.scenario_id) + "." +
                               std::to_string(r.shuffle) + ".json"),
                link.dump(2) + "\n");
    }
  }
  WriteText(out / "report.md", ReportMarkdown({result.row}));
  WriteText(out / "report.csv", ReportCsv({result.row}));
  WriteText(out / "report.json", ToJson(result.row).dump(2) + "\n");

  json failures = json::array();
  for (const auto& f : result.failures) {
    failures.push_back({{"scenario_id", f.scenario_id}, {"error", f.error}});
  }
  json manifest = {
      {"config", config.ToJson()},
      {"inputs",
       {{"data_sha256", FileHash(config.data_path)},
        {"demo_bank_sha256", config.IsRandom() ? "" : FileHash(config.demo_bank)}}},
      {"scenarios", scenarios.size()},
      {"cards", result.cards.size()},
      {"failures", failures},
      {"client",
       {{"cache_hits", result.stats.cache_hits},
        {"network_calls", result.stats.network_calls},
        {"retries", result.stats.retries},
        {"divergent_keys", result.stats.divergent_keys}}}};
  WriteText(out / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

std::vector<ReportRow> RunShotSweep(const ExperimentConfig& config,
                                    const std::vector<int>& shots) {
  std::vector<ReportRow> rows;
  for (int k : shots) {
    ExperimentConfig c = config;
    c.shots = k;
    c.output_dir = (fs::path(config.output_dir) / ("shots-" + std::to_string(k))).string();
    if (c.cache_dir.empty()) c.cache_dir = (fs::path(config.output_dir) / "cache").string();
    ReportRow row = RunExperiment(c).row;
    row.method += " (" + std::to_string(k) + "-shot)";
    rows.push_back(row);
  }
  return rows;
}

OfflineScore ScoreOffline(const fs::path& results_dir, std::optional<int> budget_ms) {
  const json manifest = json::parse(ReadText(results_dir / "manifest.json"));
  ExperimentConfig config = ExperimentConfig::FromJson(manifest.at("config"));
  if (budget_ms) config.ged_budget_ms = *budget_ms;
  const std::string expected = manifest.at("inputs").value("data_sha256", "");
  if (!expected.empty() && FileHash(config.data_path) != expected) {
    throw Error("dataset " + config.data_path + " changed since the run");
  }
  std::set<std::string> failed;
  for (const auto& f : manifest.value("failures", json::array())) {
    failed.insert(f.at("scenario_id").get<std::string>());
  }
  std::vector<Scenario> scenarios;
  for (auto& s : LoadScenarios(config)) {
    if (!failed.count(s.id)) scenarios.push_back(std::move(s));
  }
  const auto bank = config.IsRandom() ? std::nullopt : LoadBank(config);
  std::shared_ptr<LlmClient> client;
  if (!config.IsRandom()) client = MakeClient(config, nullptr, true);
  RunResult result = EvaluateScenarios(config, scenarios, bank ? &*bank : nullptr, client);
  if (!result.failures.empty()) {
    std::string msg = "cannot rescore from cache; missing or failed scenarios:";
    for (const auto& f : result.failures) msg += "\n  " + f.scenario_id + ": " + f.error;
    throw Error(msg);
  }
  return {std::move(result.cards), result.row};
}

bool LooksLikeRefusal(std::string_view text) {
  std::string t;
  for (char c : text.substr(0, 200)) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto first = t.find_first_not_of(" \t\r\n\"'");
  if (first == std::string::npos) return true;
  t = t.substr(first);
  for (const char* lead : {"i'm sorry", "i am sorry", "sorry,", "i can't", "i cannot",
                           "i can not", "i won't", "i'm unable", "i am unable",
                           "as an ai"}) {
    if (t.rfind(lead, 0) == 0) return true;
  }
  return false;
}

NarrativeGenerationSummary GenerateReferenceNarratives(
    DemoBank& bank, const std::vector<MetaPromptSpec>& specs,
    const GenerationParams& params, LlmClient& client, const Templates& templates) {
  NarrativeGenerationSummary summary;
  // Narratives are free text; the relations stop marker does not apply.
  GenerationParams p = params;
  p.stop.clear();
  for (auto& entry : bank.entries) {
    for (const auto& spec : specs) {
      const std::string key =
          NarrativeKey{params.model, spec.instruction, spec.input_format}.ToString();
      if (entry.narratives.count(key) && !entry.unusable.count(key)) {
        ++summary.skipped;
        continue;
      }
      const PromptBundle bundle = BuildMetaPrompt(entry.scenario, spec, templates);
      std::string text;
      try {
        text = client.Complete(bundle, p);
      } catch (const LlmError&) {
        entry.unusable.insert(key);
        ++summary.refused;
        continue;
      }
      const auto b = text.find_first_not_of(" \t\r\n");
      const auto e = text.find_last_not_of(" \t\r\n");
      text = b == std::string::npos ? "" : text.substr(b, e - b + 1);
      if (LooksLikeRefusal(text)) {
        entry.unusable.insert(key);
        entry.narratives.erase(key);
        ++summary.refused;
      } else {
        entry.unusable.erase(key);
        entry.narratives[key] = text;
        ++summary.generated;
      }
    }
  }
  return summary;
}

double Alignment(const std::array<std::size_t, kVerdictCount>& counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw Error("no parsed verdicts");
  return static_cast<double>(counts[static_cast<int>(Verdict::kYes)] +
                             counts[static_cast<int>(Verdict::kLargelyYes)]) /
         static_cast<double>(total);
}

json JudgeReport::ToJson() const {
  json dist = json::object();
  for (int v = 0; v < kVerdictCount; ++v) {
    dist[std::string(VerdictName(static_cast<Verdict>(v)))] = counts[v];
  }
  json queue = json::array();
  for (const auto& r : review_queue) {
    queue.push_back({{"scenario_id", r.scenario_id}, {"shuffle", r.shuffle}, {"reason", r.reason}});
  }
  return {{"distribution", dist},
          {"unparseable", unparseable},
          {"sampled", sampled},
          {"alignment", alignment},
          {"review_queue", queue}};
}

std::string JudgeReport::Markdown() const {
  std::ostringstream out;
  out << "| verdict | count |\n|---|---|\n";
  for (int v = 0; v < kVerdictCount; ++v) {
    out << "| " << VerdictName(static_cast<Verdict>(v)) << " | " << counts[v] << " |\n";
  }
  out << "| unparseable | " << unparseable << " |\n\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * alignment);
  out << "Alignment: " << buf << "% of " << (sampled - unparseable)
      << " parsed verdicts.\n\nReview queue: " << review_queue.size() << " item(s).\n";
  for (const auto& r : review_queue) {
    out << "- " << r.scenario_id << " #" << r.shuffle << ": " << r.reason << "\n";
  }
  return out.str();
}

JudgeReport JudgeFaithfulness(const fs::path& results_dir, std::size_t sample_size,
                              const GenerationParams& judge_params, LlmClient& client,
                              const Templates& templates) {
  const json manifest = json::parse(ReadText(results_dir / "manifest.json"));
  const ExperimentConfig config = ExperimentConfig::FromJson(manifest.at("config"));
  std::map<std::string, Scenario> by_id;
  for (auto& s : LoadScenarios(config)) by_id.emplace(s.id, std::move(s));

  std::vector<PredictionRecord> candidates;
  {
    std::istringstream in(ReadText(results_dir / "outputs.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto r = PredictionRecord::FromJson(json::parse(line));
      if (r.valid && r.narrative && !r.narrative->empty()) candidates.push_back(std::move(r));
    }
  }
  auto picks = Rng(DeriveSeed(config.master_seed, "judge", "sample"))
                   .Permutation(candidates.size());
  if (picks.size() > sample_size) picks.resize(sample_size);
  std::sort(picks.begin(), picks.end());

  GenerationParams p = judge_params;
  p.stop.clear();
  JudgeReport report;
  report.sampled = picks.size();
  for (std::size_t i : picks) {
    const PredictionRecord& r = candidates[i];
    const Scenario& s = by_id.at(r.scenario_id);
    TemporalGraph graph(s.EventIds());
    for (const auto& e : r.edges) graph.AddEdge(e.from, e.to);
    const auto bundle = BuildJudgePrompt(s, *r.narrative, graph, templates);
    const std::string text = client.Complete(bundle, p);
    try {
      const JudgeVerdict v = ParseJudge(text);
      ++report.counts[static_cast<int>(v.verdict)];
      if (!v.correct_links) {
        report.review_queue.push_back({r.scenario_id, r.shuffle, "missing correct link count"});
      } else if (*v.correct_links == 0) {
        report.review_queue.push_back({r.scenario_id, r.shuffle, "zero correct links"});
      }
    } catch (const ParseError& e) {
      ++report.unparseable;
      report.review_queue.push_back({r.scenario_id, r.shuffle,
                                     std::string("unparseable verdict: ") + e.what()});
    }
  }
  std::size_t parsed = 0;
  for (auto c : report.counts) parsed += c;
  report.alignment = parsed ? Alignment(report.counts) : 0.0;
  WriteText(results_dir / "judge.json", report.ToJson().dump(2) + "\n");
  WriteText(results_dir / "judge.md", report.Markdown());
  return report;
}

std::vector<ReportRow> CollectReports(const std::vector<fs::path>& dirs) {
  std::vector<ReportRow> rows;
  for (const auto& d : dirs) {
    rows.push_back(RowFromJson(json::parse(ReadText(d / "report.json"))));
  }
  return rows;
}

}  // namespace tgg
