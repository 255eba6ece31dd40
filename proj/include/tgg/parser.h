// Extraction of relations, narratives and judge verdicts from completions.

#ifndef TGG_PARSER_H_
#define TGG_PARSER_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgg/graph.h"

namespace tgg {

class ParseError : public Error {
 public:
  using Error::Error;
};

struct ModelOutput {
  std::string raw;
  // In first-seen order; duplicates and self-loops are kept for
  // Canonicalize to handle.
  std::vector<Relation> relations;
  std::optional<std::string> narrative;
  bool valid = false;
  std::vector<std::string> diagnostics;
};

inline constexpr std::string_view kDiagLeadPhrase = "lead phrase stripped";
inline constexpr std::string_view kDiagFullClass = "full class regenerated";
inline constexpr std::string_view kDiagMalformed = "malformed relation skipped";
inline constexpr std::string_view kDiagUnterminated = "unterminated relation list";
inline constexpr std::string_view kDiagNoRelations = "no relations found";

// Reads the last get_relations() return list when the completion has a
// method wrapper, otherwise the last bracketed list of arrow strings.
// Accepts "->" and "→" arrows with any surrounding spacing and either
// quote style. Never throws.
ModelOutput ExtractRelations(std::string_view raw);

// Body of the last get_narrative() method, unquoted and trimmed.
std::optional<std::string> ExtractNarrative(std::string_view raw);

// ExtractRelations plus ExtractNarrative.
ModelOutput ParseCompletion(std::string_view raw);

enum class Verdict { kYes, kLargelyYes, kAmbivalent, kLargelyNo, kNo };
inline constexpr int kVerdictCount = 5;
std::string_view VerdictName(Verdict v);

struct JudgeVerdict {
  Verdict verdict = Verdict::kAmbivalent;
  std::string rationale;
  std::optional<int> total_links;
  std::optional<int> correct_links;
  std::vector<std::string> diagnostics;
};

// Reads Answer / Rationale / Temporal links / Correct temporal links lines,
// case-insensitively. Throws ParseError without a recognisable Answer.
JudgeVerdict ParseJudge(std::string_view raw);

}  // namespace tgg

#endif  // TGG_PARSER_H_
