#include "tgg/prompt.h"

#include <algorithm>
#include <cctype>
#include <set>

#include "tgg/seeding.h"

namespace tgg {

namespace {

std::vector<std::string> Words(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(c));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

std::string Lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string Capitalized(std::string s) {
  s = Lower(std::move(s));
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string Quoted(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

void CheckPresentationOrder(const Scenario& s,
                            const std::vector<EventId>& order) {
  std::vector<EventId> a = s.EventIds(), b = order;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) {
    throw Error("presentation order of " + s.id +
                " is not a permutation of its events");
  }
}

std::string Label(const LabelAssignment& assignment, const EventId& id) {
  auto label = assignment.LabelFor(id);
  if (!label) throw Error("event " + id + " has no label");
  return *label;
}

}  // namespace

std::string CamelCaseIdentifier(std::string_view description) {
  auto words = Words(description);
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    out += i == 0 ? Lower(words[i]) : Capitalized(words[i]);
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) {
    out = "event";
    for (auto& w : words) out += Capitalized(w);
  }
  return out;
}

std::string ClassName(std::string_view title) {
  std::string out;
  for (auto& w : Words(title)) out += Capitalized(w);
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) {
    out = "Scenario" + out;
  }
  return out;
}

LabelAssignment AssignLabels(const Scenario& scenario, std::uint64_t seed,
                             InputFormat format, LabelScheme scheme) {
  std::vector<std::pair<std::string, EventId>> bindings;
  const std::size_t n = scenario.events.size();
  if (format == InputFormat::kAlphabetical) {
    if (n > kMaxAlphabeticalEvents) {
      throw Error("scenario " + scenario.id + " has " + std::to_string(n) +
                  " events; alphabetical labels support at most 26");
    }
    std::vector<std::size_t> events(n);
    for (std::size_t i = 0; i < n; ++i) events[i] = i;
    if (scheme == LabelScheme::kSeededRandom) {
      Rng rng(seed);
      rng.Shuffle(events);
    }
    for (std::size_t i = 0; i < n; ++i) {
      bindings.emplace_back("step" + std::string(1, static_cast<char>('A' + i)),
                            scenario.events[events[i]].id);
    }
  } else {
    std::set<std::string> taken;
    for (const auto& e : scenario.events) {
      const std::string base = CamelCaseIdentifier(e.description);
      std::string id = base;
      for (int k = 2; taken.count(id); ++k) id = base + std::to_string(k);
      taken.insert(id);
      bindings.emplace_back(id, e.id);
    }
  }
  return LabelAssignment(format, std::move(bindings));
}

std::string RenderClass(const Scenario& scenario,
                        const LabelAssignment& assignment,
                        const std::vector<EventId>& presentation_order,
                        const RenderOptions& options) {
  CheckPresentationOrder(scenario, presentation_order);
  std::string out = "class " + ClassName(scenario.title) + ":\n\n";
  out += "    title = " + Quoted(scenario.title) + "\n";
  out += "    steps = " + std::to_string(scenario.events.size()) + "\n\n";
  for (const auto& id : presentation_order) {
    out += "    def " + Label(assignment, id) + "(self):\n";
    out += "        return " + Quoted(scenario.FindEvent(id)->description) +
           "\n\n";
  }
  if (options.narrative) {
    out += "    " + std::string(kNarrativeCue) + "\n";
    out += "    def get_narrative(self):\n";
    out += "        return " + Quoted(*options.narrative) + "\n\n";
  }
  if (options.relations) {
    out += "    def get_relations(self):\n";
    out += "        return [\n";
    for (const auto& e : scenario.gold_edges) {
      out += "            " +
             Quoted(Label(assignment, e.from) + " -> " +
                    Label(assignment, e.to)) +
             ",\n";
    }
    out += "        ]\n";
  }
  switch (options.stub) {
    case QueryStub::kNone:
      break;
    case QueryStub::kNarrativeThenRelations:
      out += "    " + std::string(kNarrativeCue) + "\n";
      out += "    def get_narrative(self):\n";
      out += "        # TODO\n\n";
      [[fallthrough]];
    case QueryStub::kRelations:
    case QueryStub::kCotRelations:
      if (options.stub == QueryStub::kCotRelations) {
        out += "    " + std::string(kStepByStepCue) + "\n";
      }
      out += "    def get_relations(self):\n";
      out += "        # TODO\n";
      out += "        " + std::string(kEndMarker) + "\n";
      break;
  }
  // Drop the blank line left after the last event method when nothing
  // follows it.
  while (out.size() >= 2 && out[out.size() - 1] == '\n' &&
         out[out.size() - 2] == '\n') {
    out.pop_back();
  }
  return out;
}

PromptBundle BuildPrompt(Method method, const std::vector<Demonstration>& demos,
                         const Scenario& query,
                         const LabelAssignment& assignment,
                         const std::vector<EventId>& presentation_order,
                         int shots, bool use_references,
                         const Templates& templates) {
  if (shots < 0 || static_cast<std::size_t>(shots) > demos.size()) {
    throw Error("requested " + std::to_string(shots) + " shots but only " +
                std::to_string(demos.size()) + " demonstrations available");
  }
  const bool narratives = method == Method::kNot && use_references;
  std::string demo_text;
  for (int i = 0; i < shots; ++i) {
    const auto& demo = demos[i];
    RenderOptions opts;
    opts.relations = true;
    if (narratives) {
      if (!demo.reference_narrative) {
        throw Error("demonstration " + demo.scenario.id +
                    " has no reference narrative");
      }
      opts.narrative = demo.reference_narrative;
    }
    auto demo_labels = AssignLabels(
        demo.scenario, DeriveSeed(kDemoSeed, demo.scenario.id, "labels"),
        assignment.format());
    auto order = demo.scenario.EventIds();
    Rng(DeriveSeed(kDemoSeed, demo.scenario.id, "order")).Shuffle(order);
    demo_text += RenderClass(demo.scenario, demo_labels, order, opts);
    demo_text += "\n\n";
  }
  RenderOptions query_opts;
  switch (method) {
    case Method::kStandard: query_opts.stub = QueryStub::kRelations; break;
    case Method::kCot: query_opts.stub = QueryStub::kCotRelations; break;
    case Method::kNot: query_opts.stub = QueryStub::kNarrativeThenRelations; break;
  }
  const std::string query_text =
      RenderClass(query, assignment, presentation_order, query_opts);

  PromptBundle bundle;
  bundle.method = method;
  bundle.shots = shots;
  bundle.input_format = assignment.format();
  bundle.assignment = assignment;
  bundle.presentation_order = presentation_order;
  bundle.messages.push_back(
      {"user", FillPlaceholders(templates.inference,
                                {{"DEMONSTRATIONS", demo_text},
                                 {"QUERY", query_text}})});
  return bundle;
}

PromptBundle BuildMetaPrompt(const Scenario& demo, const MetaPromptSpec& spec,
                             const Templates& templates) {
  if (demo.gold_edges.empty()) {
    throw Error("meta prompt needs a demonstration with gold edges: " + demo.id);
  }
  auto labels = AssignLabels(demo, DeriveSeed(kDemoSeed, demo.id, "labels"),
                             spec.input_format);
  auto order = demo.EventIds();
  Rng(DeriveSeed(kDemoSeed, demo.id, "order")).Shuffle(order);
  RenderOptions opts;
  opts.relations = true;
  std::string genre;
  switch (spec.instruction) {
    case InstructionType::kNewsReport: genre = "news report"; break;
    case InstructionType::kSimpleEnglish:
    case InstructionType::kRolePlay: genre = "story"; break;
    case InstructionType::kSimpleReport: genre = "report"; break;
  }
  PromptBundle bundle;
  bundle.input_format = spec.input_format;
  bundle.assignment = labels;
  bundle.presentation_order = order;
  bundle.messages.push_back(
      {"user",
       FillPlaceholders(templates.meta,
                        {{"INSTRUCTION",
                          templates.meta_instructions.at(spec.instruction)},
                         {"CLASS", RenderClass(demo, labels, order, opts)},
                         {"GENRE", genre}})});
  return bundle;
}

std::string SerializeGraphForJudge(const Scenario& scenario,
                                   const TemporalGraph& graph) {
  auto name = [&](const std::string& node) {
    if (const Event* e = scenario.FindEvent(node)) return e->description;
    if (node.starts_with(kHallucinatedPrefix)) {
      return node.substr(kHallucinatedPrefix.size());
    }
    return node;
  };
  std::string out = "[";
  bool first = true;
  for (const auto& e : graph.edges()) {
    if (!first) out += ", ";
    first = false;
    out += "(" + name(e.from) + " -> " + name(e.to) + ")";
  }
  return out + "]";
}

PromptBundle BuildJudgePrompt(const Scenario& scenario,
                              const std::string& narrative,
                              const TemporalGraph& graph,
                              const Templates& templates) {
  if (narrative.empty()) throw Error("judge prompt needs a narrative");
  std::string events = "[";
  for (std::size_t i = 0; i < scenario.events.size(); ++i) {
    if (i) events += ", ";
    events += scenario.events[i].description;
  }
  events += "]";
  PromptBundle bundle;
  bundle.messages.push_back(
      {"user", FillPlaceholders(templates.judge,
                                {{"SCENARIO", scenario.title},
                                 {"EVENTS", events},
                                 {"NARRATIVE", narrative},
                                 {"TEMPORAL GRAPH",
                                  SerializeGraphForJudge(scenario, graph)}})});
  return bundle;
}

}  // namespace tgg
