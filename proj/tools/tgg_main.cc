// tgg: temporal graph generation evaluation harness.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tgg/datasets.h"
#include "tgg/runner.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string ReadText(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw tgg::Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ConvertArgs {
  std::string dataset, input, output, manifest, split;
};

int Convert(const ConvertArgs& a) {
  tgg::LoadReport report;
  std::vector<tgg::Scenario> scenarios;
  if (a.dataset == "proscript") {
    scenarios = tgg::LoadProscript(a.input, &report);
  } else if (a.dataset == "schema11") {
    scenarios = tgg::LoadSchema11(a.input);
    report.read = scenarios.size();
  } else if (a.dataset == "wikihow") {
    scenarios = tgg::LoadWikihow(a.input, &report);
  } else {
    throw tgg::Error("unknown dataset " + a.dataset);
  }
  if (!a.split.empty()) {
    const tgg::Split want = tgg::ParseSplit(a.split);
    std::erase_if(scenarios, [&](const tgg::Scenario& s) { return s.split != want; });
  }
  tgg::WriteScenarios(a.output, scenarios);
  std::cerr << "read " << report.read << " records, kept " << scenarios.size()
            << ", rejected " << report.rejected.size() << "\n";
  for (std::size_t i = 0; i < report.rejected.size() && i < 20; ++i) {
    std::cerr << "  rejected " << report.rejected[i] << "\n";
  }
  auto manifest = tgg::ComputeManifest(a.dataset, a.input, scenarios);
  json j = tgg::ToJson(manifest);
  j["rejected"] = report.rejected;
  json checks = json::array();
  for (const auto& c : tgg::CheckManifest(manifest)) {
    checks.push_back({{"what", c.what}, {"expected", c.expected}, {"actual", c.actual},
                      {"tolerance", c.tolerance}, {"pass", c.pass}});
    std::cerr << (c.pass ? "  ok   " : "  DIFF ") << c.what << ": " << c.actual
              << " (published " << c.expected << ")\n";
  }
  j["published_checks"] = checks;
  const std::string path = a.manifest.empty() ? a.output + ".manifest.json" : a.manifest;
  std::ofstream(path) << j.dump(2) << "\n";
  return 0;
}

struct BackendArgs {
  std::string backend = "http";
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = std::string(tgg::kDefaultApiKeyEnv);
  std::string cache = "cache";
  int max_in_flight = 4;
};

void AddBackendOptions(CLI::App* app, BackendArgs& b) {
  app->add_option("--backend", b.backend, "http or mock:<gold|random_chain|refusal>");
  app->add_option("--base-url", b.base_url, "OpenAI-compatible endpoint");
  app->add_option("--api-key-env", b.api_key_env, "environment variable holding the key");
  app->add_option("--cache", b.cache, "response cache directory");
  app->add_option("--max-in-flight", b.max_in_flight, "concurrent requests");
}

tgg::LlmClient MakeClient(const BackendArgs& b, std::vector<tgg::Scenario> registry) {
  tgg::ExperimentConfig c;
  c.backend = b.backend;
  c.base_url = b.base_url;
  c.api_key_env = b.api_key_env;
  tgg::ClientOptions opts;
  opts.max_in_flight = b.max_in_flight;
  return tgg::LlmClient(tgg::MakeBackend(c, std::move(registry)),
                        std::make_shared<tgg::ResponseCache>(tgg::BackendCacheDir(b.cache, b.backend)), opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal graph generation evaluation harness"};
  app.require_subcommand(1);

  ConvertArgs convert;
  auto* convert_cmd = app.add_subcommand("convert", "Normalize a corpus to scenario JSONL");
  convert_cmd->add_option("--dataset", convert.dataset, "proscript, schema11 or wikihow")
      ->required()
      ->check(CLI::IsMember({"proscript", "schema11", "wikihow"}));
  convert_cmd->add_option("--input", convert.input, "release file or directory")->required();
  convert_cmd->add_option("--output", convert.output, "normalized JSONL")->required();
  convert_cmd->add_option("--manifest", convert.manifest, "statistics JSON");
  convert_cmd->add_option("--split", convert.split, "keep only train or eval");

  std::string bank_path, bank_out, gen_model = "gpt-4";
  std::vector<std::string> instructions = {"simple_report"};
  std::vector<std::string> formats = {"alphabetical"};
  BackendArgs gen_backend;
  auto* gen_cmd = app.add_subcommand("gen-narratives", "Write reference narratives into the demo bank");
  gen_cmd->add_option("--bank", bank_path, "demo bank JSON")->required();
  gen_cmd->add_option("--out", bank_out, "output bank (default: in place)");
  gen_cmd->add_option("--model", gen_model, "generator model");
  gen_cmd->add_option("--instruction", instructions, "meta prompt types");
  gen_cmd->add_option("--format", formats, "input formats");
  AddBackendOptions(gen_cmd, gen_backend);

  std::string config_path, output_override, backend_override;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::size_t> limit_override;
  std::optional<int> workers_override;
  std::vector<int> sweep;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cmd->add_option("--config", config_path, "experiment config JSON")->required();
  run_cmd->add_option("--output", output_override, "results directory");
  run_cmd->add_option("--backend", backend_override, "http or mock:<policy>");
  run_cmd->add_option("--seed", seed_override, "master seed");
  run_cmd->add_option("--limit", limit_override, "first N scenarios");
  run_cmd->add_option("--workers", workers_override, "scenario workers");
  run_cmd->add_option("--sweep-shots", sweep, "run once per shot count, e.g. 0 1 3 5 10");

  std::string results_dir;
  std::optional<int> budget_override;
  bool write_rescored = false;
  auto* score_cmd = app.add_subcommand("score", "Re-score a finished run from its cache");
  score_cmd->add_option("--results", results_dir, "results directory")->required();
  score_cmd->add_option("--ged-budget-ms", budget_override, "override GED budget");
  score_cmd->add_flag("--write", write_rescored, "write cards.rescored.jsonl and report.rescored.md");

  std::string judge_dir, judge_model = "gpt-4";
  std::size_t judge_sample = tgg::kDefaultJudgeSample;
  BackendArgs judge_backend;
  auto* judge_cmd = app.add_subcommand("judge", "Judge narrative/graph faithfulness");
  judge_cmd->add_option("--results", judge_dir, "results directory of a NoT run")->required();
  judge_cmd->add_option("--sample", judge_sample, "outputs to judge");
  judge_cmd->add_option("--model", judge_model, "judge model");
  AddBackendOptions(judge_cmd, judge_backend);

  std::vector<std::string> report_dirs;
  std::string report_format = "md";
  auto* report_cmd = app.add_subcommand("report", "Combine report rows of several runs");
  report_cmd->add_option("dirs", report_dirs, "results directories")->required();
  report_cmd->add_option("--format", report_format, "md or csv")
      ->check(CLI::IsMember({"md", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*convert_cmd) return Convert(convert);

    if (*gen_cmd) {
      tgg::DemoBank bank = tgg::DemoBank::Load(bank_path);
      std::vector<tgg::MetaPromptSpec> specs;
      for (const auto& i : instructions) {
        for (const auto& f : formats) {
          specs.push_back({tgg::ParseInstructionType(i), tgg::ParseInputFormat(f)});
        }
      }
      std::vector<tgg::Scenario> registry;
      for (const auto& e : bank.entries) registry.push_back(e.scenario);
      auto client = MakeClient(gen_backend, registry);
      tgg::GenerationParams params;
      params.model = gen_model;
      auto summary = tgg::GenerateReferenceNarratives(bank, specs, params, client);
      bank.Save(bank_out.empty() ? bank_path : bank_out);
      std::cout << "generated " << summary.generated << ", kept " << summary.skipped
                << ", refused " << summary.refused << "\n";
      return 0;
    }

    if (*run_cmd) {
      auto config = tgg::ExperimentConfig::Load(config_path);
      if (!output_override.empty()) config.output_dir = output_override;
      if (!backend_override.empty()) config.backend = backend_override;
      if (seed_override) config.master_seed = *seed_override;
      if (limit_override) config.limit = *limit_override;
      if (workers_override) config.workers = *workers_override;
      if (!sweep.empty()) {
        auto rows = tgg::RunShotSweep(config, sweep);
        std::cout << tgg::ReportMarkdown(rows);
        return 0;
      }
      auto result = tgg::RunExperiment(config);
      std::cout << tgg::ReportMarkdown({result.row});
      if (!result.failures.empty()) {
        std::cerr << result.failures.size() << " scenario(s) failed; see manifest.json\n";
        return 2;
      }
      return 0;
    }

    if (*score_cmd) {
      auto rescored = tgg::ScoreOffline(results_dir, budget_override);
      const std::string cards = tgg::CardsToJsonl(rescored.cards);
      const bool identical = cards == ReadText(fs::path(results_dir) / "cards.jsonl");
      std::cout << tgg::ReportMarkdown({rescored.row});
      std::cout << (identical ? "cards identical to the recorded run\n"
                              : "cards DIFFER from the recorded run\n");
      if (write_rescored) {
        std::ofstream(fs::path(results_dir) / "cards.rescored.jsonl") << cards;
        std::ofstream(fs::path(results_dir) / "report.rescored.md")
            << tgg::ReportMarkdown({rescored.row});
      }
      return identical ? 0 : 3;
    }

    if (*judge_cmd) {
      const json manifest = json::parse(ReadText(fs::path(judge_dir) / "manifest.json"));
      const auto config = tgg::ExperimentConfig::FromJson(manifest.at("config"));
      auto client = MakeClient(judge_backend, tgg::ReadScenarios(config.data_path));
      tgg::GenerationParams params;
      params.model = judge_model;
      auto report = tgg::JudgeFaithfulness(judge_dir, judge_sample, params, client);
      std::cout << report.Markdown();
      return 0;
    }

    if (*report_cmd) {
      std::vector<fs::path> dirs(report_dirs.begin(), report_dirs.end());
      auto rows = tgg::CollectReports(dirs);
      std::cout << (report_format == "csv" ? tgg::ReportCsv(rows) : tgg::ReportMarkdown(rows));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
