#include <fstream>
#include <sstream>

#include "tgg/prompt.h"

namespace tgg {

namespace {

constexpr std::string_view kInference =
    "Each scenario below is written as a Python class. Every event of the "
    "scenario is a method whose name identifies the event and whose return "
    "value is the event description. The get_relations(self) method returns "
    "the temporal relations among the events as a list of strings of the "
    "form \"<event> -> <event>\", meaning that the first event happens "
    "before the second one.\n"
    "Complete the last class by implementing the methods marked with "
    "\"# TODO\". Only write the implementation of those methods. Do not "
    "repeat the class or its events, and do not add any lead phrase.\n"
    "\n"
    "[DEMONSTRATIONS][QUERY]";

constexpr std::string_view kMeta =
    "[INSTRUCTION]\n"
    "[CLASS]\n"
    "Now, write the *[GENRE]*.\n";

constexpr std::string_view kPreface =
    "You are provided with a set of unordered event descriptions. "
    "You are also provided with a set of event relations which instructs you "
    "how to temporally link a pair of events. "
    "They are displayed as functions defined within a python class.\n";

constexpr std::string_view kNewsReport =
    "Your goal is to write a *news report* based on the provided event "
    "descriptions and event relations set. "
    "The generated *news report* should adhere to the non-fiction genre. "
    "Meanwhile, the generated *news report* should honor the provided "
    "temporal information.\n";

constexpr std::string_view kSimpleEnglish =
    "Your goal is to write a *simple and concise story* based on the "
    "provided event descriptions and event relations set. "
    "The generated *story* should be simple such that it can be understood "
    "by a 10-year-old child, "
    "and it should be concise such that it can be written within a short "
    "paragraph. "
    "Meanwhile, the generated *story* should honor the provided temporal "
    "information.\n";

constexpr std::string_view kRolePlay =
    "Your goal is to write a *simple and concise story* based on the "
    "provided event descriptions and event relations set. "
    "The generated *story* should honor the provided temporal information.\n"
    "Now, imagine you are a character in the *story*. "
    "Let's write a *story* that clearly depicts how you, as a character, "
    "experience the events, and how you react to them.";

constexpr std::string_view kSimpleReport =
    "Your goal is to write a *simple and concise report* based on the "
    "provided event descriptions and event relations set. "
    "The generated *report* should be simple such that it can be understood "
    "by a 10-year-old child, "
    "and it should be concise such that it can be written within a short "
    "paragraph. "
    "Meanwhile, the generated *report* should honor the provided temporal "
    "information.\n";

constexpr std::string_view kJudge =
    "The temporal graph is represented as a list of tuples, where each tuple "
    "contains two events. The first event happens before the second event, "
    "connected with '->'.\n"
    "Your task is to determine whether the narrative is faithful to the "
    "temporal graph. The faithfulness is solely determined by whether the "
    "temporal relations in the temporal graph *honor* the chronological "
    "order among events in the narrative.\n"
    "How to make an assessment: If the temporal graph is completely faithful "
    "to the narrative, type 'yes'. If largely faithful with minor mistakes, "
    "type 'largely yes'. If largely not faithful with only a few temporal "
    "relations captured, type 'largely no'. If completely not faithful, type "
    "'no'. For other cases, type 'ambivalent'.\n"
    "Your response should be in the following format:\n"
    "\n"
    "'''\n"
    "Answer: yes/largely yes/ambivalent/largely no/no\n"
    "Rationale: <your rationale>\n"
    "Temporal links: <count the number of temporal links in the graph>\n"
    "Correct temporal links: <determine the number of *correct* temporal "
    "links>\n"
    "'''\n"
    "\n"
    "Let's start!\n"
    "\n"
    "Scenario: [SCENARIO]\n"
    "Events: [EVENTS]\n"
    "Narrative: [NARRATIVE]\n"
    "Temporal Graph: [TEMPORAL GRAPH]";

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

}  // namespace

std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kStandard: return "standard";
    case Method::kCot: return "cot";
    case Method::kNot: return "not";
  }
  return "";
}

Method ParseMethod(std::string_view s) {
  if (s == "standard") return Method::kStandard;
  if (s == "cot") return Method::kCot;
  if (s == "not") return Method::kNot;
  throw Error("unknown method: " + std::string(s));
}

std::string_view InstructionTypeName(InstructionType t) {
  switch (t) {
    case InstructionType::kNewsReport: return "news_report";
    case InstructionType::kSimpleEnglish: return "simple_english";
    case InstructionType::kRolePlay: return "role_play";
    case InstructionType::kSimpleReport: return "simple_report";
  }
  return "";
}

InstructionType ParseInstructionType(std::string_view s) {
  for (auto t : {InstructionType::kNewsReport, InstructionType::kSimpleEnglish,
                 InstructionType::kRolePlay, InstructionType::kSimpleReport}) {
    if (InstructionTypeName(t) == s) return t;
  }
  throw Error("unknown instruction type: " + std::string(s));
}

std::string NarrativeKey::ToString() const {
  return generator + "/" + std::string(InstructionTypeName(instruction)) +
         "/" + std::string(InputFormatName(input_format));
}

NarrativeKey NarrativeKey::Parse(std::string_view s) {
  auto first = s.find('/');
  auto last = s.rfind('/');
  if (first == std::string_view::npos || first == last) {
    throw Error("narrative key must be generator/instruction/format: " +
                std::string(s));
  }
  NarrativeKey k;
  k.generator = std::string(s.substr(0, first));
  k.instruction = ParseInstructionType(s.substr(first + 1, last - first - 1));
  k.input_format = ParseInputFormat(s.substr(last + 1));
  if (k.generator.empty()) throw Error("narrative key has no generator");
  return k;
}

const Templates& Templates::Default() {
  static const Templates kDefault = [] {
    Templates t;
    t.inference = kInference;
    t.meta = kMeta;
    t.judge = kJudge;
    t.meta_instructions[InstructionType::kNewsReport] =
        std::string(kPreface) + std::string(kNewsReport);
    t.meta_instructions[InstructionType::kSimpleEnglish] =
        std::string(kPreface) + std::string(kSimpleEnglish);
    t.meta_instructions[InstructionType::kRolePlay] =
        std::string(kPreface) + std::string(kRolePlay);
    t.meta_instructions[InstructionType::kSimpleReport] =
        std::string(kPreface) + std::string(kSimpleReport);
    return t;
  }();
  return kDefault;
}

Templates Templates::Load(const std::filesystem::path& dir) {
  Templates t = Default();
  auto maybe = [&](const char* name, std::string& slot) {
    auto p = dir / name;
    if (std::filesystem::exists(p)) slot = ReadFile(p);
  };
  maybe("inference.txt", t.inference);
  maybe("meta.txt", t.meta);
  maybe("judge.txt", t.judge);
  for (auto& [type, text] : t.meta_instructions) {
    auto name = "meta_" + std::string(InstructionTypeName(type)) + ".txt";
    maybe(name.c_str(), text);
  }
  return t;
}

void Templates::Save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  WriteFile(dir / "inference.txt", inference);
  WriteFile(dir / "meta.txt", meta);
  WriteFile(dir / "judge.txt", judge);
  for (const auto& [type, text] : meta_instructions) {
    WriteFile(dir / ("meta_" + std::string(InstructionTypeName(type)) + ".txt"),
              text);
  }
}

std::string FillPlaceholders(
    std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find('[', pos);
    if (open == std::string_view::npos) break;
    auto close = text.find(']', open);
    if (close == std::string_view::npos) break;
    auto it = values.find(std::string(text.substr(open + 1, close - open - 1)));
    if (it == values.end()) {
      out.append(text.substr(pos, open + 1 - pos));
      pos = open + 1;
      continue;
    }
    out.append(text.substr(pos, open - pos));
    out += it->second;
    pos = close + 1;
  }
  out.append(text.substr(pos));
  return out;
}

}  // namespace tgg
