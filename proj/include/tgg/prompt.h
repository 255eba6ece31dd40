// Rendering of scenarios as Python-class code prompts.
//
// A scenario becomes a class whose methods are its events:
//
//   class BombingAttacks:
//
//       title = "bombing attacks"
//       steps = 10
//
//       def stepA(self):
//           return "people are killed"
//       ...
//       def get_relations(self):
//           return [
//               "stepB -> stepH",
//           ]
//
// Demonstrations carry implemented methods; the query ends in stubs that
// the model completes.

#ifndef TGG_PROMPT_H_
#define TGG_PROMPT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgg/graph.h"

namespace tgg {

enum class Method { kStandard, kCot, kNot };
std::string_view MethodName(Method m);
Method ParseMethod(std::string_view s);

enum class InstructionType { kNewsReport, kSimpleEnglish, kRolePlay, kSimpleReport };
std::string_view InstructionTypeName(InstructionType t);
InstructionType ParseInstructionType(std::string_view s);

struct MetaPromptSpec {
  InstructionType instruction = InstructionType::kSimpleReport;
  InputFormat input_format = InputFormat::kAlphabetical;
};

// Identifies one family of reference narratives in the demo bank.
struct NarrativeKey {
  std::string generator;
  InstructionType instruction = InstructionType::kSimpleReport;
  InputFormat input_format = InputFormat::kAlphabetical;

  // "generator/instruction/format", e.g. "gpt-4/simple_report/alphabetical".
  std::string ToString() const;
  static NarrativeKey Parse(std::string_view s);
  auto operator<=>(const NarrativeKey&) const = default;
};

struct Demonstration {
  Scenario scenario;
  std::optional<std::string> reference_narrative;
  std::optional<NarrativeKey> narrative_key;
};

struct Message {
  std::string role;
  std::string content;

  bool operator==(const Message&) const = default;
};

struct PromptBundle {
  std::vector<Message> messages;
  Method method = Method::kStandard;
  int shots = 0;
  InputFormat input_format = InputFormat::kAlphabetical;
  LabelAssignment assignment;
  std::vector<EventId> presentation_order;
  std::uint64_t shuffle_seed = 0;
};

// The editable natural-language parts of every prompt. Placeholders are
// bracketed names substituted in a single pass.
struct Templates {
  // Placeholders: [DEMONSTRATIONS], [QUERY].
  std::string inference;
  // Placeholders: [INSTRUCTION], [CLASS], [GENRE].
  std::string meta;
  std::map<InstructionType, std::string> meta_instructions;
  // Placeholders: [SCENARIO], [EVENTS], [NARRATIVE], [TEMPORAL GRAPH].
  std::string judge;

  static const Templates& Default();
  // Reads inference.txt, meta.txt and judge.txt from dir; files that do not
  // exist keep their default text.
  static Templates Load(const std::filesystem::path& dir);
  void Save(const std::filesystem::path& dir) const;
};

// Replaces each [NAME] in text with values.at(NAME). Substituted text is
// never rescanned.
std::string FillPlaceholders(
    std::string_view text, const std::map<std::string, std::string>& values);

enum class LabelScheme { kSeededRandom, kDatasetOrder };

inline constexpr std::size_t kMaxAlphabeticalEvents = 26;

// Alphabetical: stepA.. bound to events by a seeded permutation (or in
// dataset order). Descriptive: camel-cased descriptions, with numeric
// suffixes on collision. Throws Error for more than 26 events in
// alphabetical mode.
LabelAssignment AssignLabels(const Scenario& scenario, std::uint64_t seed,
                             InputFormat format,
                             LabelScheme scheme = LabelScheme::kSeededRandom);

std::string CamelCaseIdentifier(std::string_view description);
std::string ClassName(std::string_view title);

enum class QueryStub { kNone, kRelations, kCotRelations, kNarrativeThenRelations };

struct RenderOptions {
  bool relations = false;
  std::optional<std::string> narrative;
  QueryStub stub = QueryStub::kNone;
};

inline constexpr std::string_view kNarrativeCue =
    "# Let's think of a narrative to link aforementioned events in the "
    "correct temporal order.";
inline constexpr std::string_view kStepByStepCue = "# Let's think step by step";
inline constexpr std::string_view kEndMarker = "# END";

std::string RenderClass(const Scenario& scenario,
                        const LabelAssignment& assignment,
                        const std::vector<EventId>& presentation_order,
                        const RenderOptions& options);

// Seed used for the labels and method order of demonstrations, so that a
// demo renders identically in every prompt.
inline constexpr std::uint64_t kDemoSeed = 20240601;

// Assembles demos (first `shots` of `demos`, in order) followed by the
// query. With use_references, NoT demos show their reference narrative and
// a missing one is an Error.
PromptBundle BuildPrompt(Method method, const std::vector<Demonstration>& demos,
                         const Scenario& query,
                         const LabelAssignment& assignment,
                         const std::vector<EventId>& presentation_order,
                         int shots, bool use_references = true,
                         const Templates& templates = Templates::Default());

// Prompt asking a generator model for a reference narrative of demo.
PromptBundle BuildMetaPrompt(const Scenario& demo, const MetaPromptSpec& spec,
                             const Templates& templates = Templates::Default());

// Tuple-list rendering of graph over event descriptions, e.g.
// [(person plans an attack -> person places bomb), (...)].
std::string SerializeGraphForJudge(const Scenario& scenario,
                                   const TemporalGraph& graph);

PromptBundle BuildJudgePrompt(const Scenario& scenario,
                              const std::string& narrative,
                              const TemporalGraph& graph,
                              const Templates& templates = Templates::Default());

}  // namespace tgg

#endif  // TGG_PROMPT_H_
