#include "tgg/parser.h"

#include <algorithm>
#include <cctype>
#include <regex>

namespace tgg {

namespace {

constexpr std::string_view kUnicodeArrow = "\xE2\x86\x92";

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool IsLabel(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
    return false;
  }
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

// Position of the last regex match in text, or npos.
std::size_t LastMatch(std::string_view text, const std::regex& re) {
  std::size_t last = std::string_view::npos;
  for (std::cregex_iterator it(text.data(), text.data() + text.size(), re), end;
       it != end; ++it) {
    last = static_cast<std::size_t>(it->position());
  }
  return last;
}

// Index of the bracket closing the one at open, skipping quoted text.
std::size_t MatchingBracket(std::string_view text, std::size_t open) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote || c == '\n') {
        quote = 0;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

bool HasArrow(std::string_view s) {
  return s.find("->") != std::string_view::npos ||
         s.find(kUnicodeArrow) != std::string_view::npos;
}

// Splits "a -> b -> c" into its labels; empty when any part is not a label.
std::vector<std::string> SplitArrows(std::string_view entry) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t ascii = entry.find("->", pos);
    std::size_t uni = entry.find(kUnicodeArrow, pos);
    std::size_t next = std::min(ascii, uni);
    std::string_view part = Trim(entry.substr(pos, next == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : next - pos));
    parts.emplace_back(part);
    if (next == std::string_view::npos) break;
    pos = next + (next == ascii ? 2 : kUnicodeArrow.size());
  }
  if (parts.size() < 2) return {};
  for (const auto& p : parts) {
    if (!IsLabel(p)) return {};
  }
  return parts;
}

void AddEntry(std::string_view entry, ModelOutput& out, bool& malformed) {
  entry = Trim(entry);
  if (entry.empty()) return;
  auto parts = SplitArrows(entry);
  if (parts.empty()) {
    malformed = true;
    return;
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    out.relations.emplace_back(parts[i - 1], parts[i]);
  }
}

// Entries of a list body: quoted strings, or comma/newline separated bare
// arrows when nothing is quoted.
void ParseEntries(std::string_view body, ModelOutput& out, bool& malformed) {
  bool quoted_any = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c != '"' && c != '\'') continue;
    std::size_t end = i + 1;
    while (end < body.size() && body[end] != c && body[end] != '\n') {
      if (body[end] == '\\') ++end;
      ++end;
    }
    if (end >= body.size() || body[end] != c) break;
    quoted_any = true;
    std::string_view entry = body.substr(i + 1, end - i - 1);
    if (HasArrow(entry)) {
      AddEntry(entry, out, malformed);
    } else if (!Trim(entry).empty()) {
      malformed = true;
    }
    i = end;
  }
  if (quoted_any) return;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || body[i] == ',' || body[i] == '\n') {
      std::string_view piece = Trim(body.substr(start, i - start));
      if (!piece.empty()) {
        if (HasArrow(piece)) {
          AddEntry(piece, out, malformed);
        } else {
          malformed = true;
        }
      }
      start = i + 1;
    }
  }
}

bool LooksLikeCode(std::string_view line) {
  static const std::vector<std::string_view> kStarts = {
      "class ", "def ", "return", "[", "]", "\"", "'", "#", "```", "(", ")",
      "@",      "{",    "}"};
  for (auto s : kStarts) {
    if (line.starts_with(s)) return true;
  }
  return HasArrow(line) && SplitArrows(line).size() >= 2;
}

std::string_view FirstContentLine(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = Trim(text.substr(pos, nl - pos));
    if (!line.empty()) return line;
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return {};
}

}  // namespace

ModelOutput ExtractRelations(std::string_view raw) {
  static const std::regex kRelationsDef(R"(def\s+get_relations?\s*\()");
  static const std::regex kClassDef(R"((^|\n)\s*class\s+\w+)");
  static const std::regex kNextDef(R"(\n[ \t]*(def|class)\s)");

  ModelOutput out;
  out.raw = std::string(raw);
  const std::string_view first = FirstContentLine(raw);
  if (!first.empty() && !LooksLikeCode(first)) {
    out.diagnostics.emplace_back(kDiagLeadPhrase);
  }
  if (LastMatch(raw, kClassDef) != std::string_view::npos) {
    out.diagnostics.emplace_back(kDiagFullClass);
  }

  bool malformed = false;
  std::string_view region;
  const std::size_t def = LastMatch(raw, kRelationsDef);
  if (def != std::string_view::npos) {
    region = raw.substr(def);
    std::cmatch m;
    if (std::regex_search(region.data() + 1, region.data() + region.size(), m,
                          kNextDef)) {
      region = region.substr(0, static_cast<std::size_t>(m.position()) + 1);
    }
    std::size_t ret = region.find("return");
    std::size_t open = region.find('[', ret == std::string_view::npos ? 0 : ret);
    if (open != std::string_view::npos) {
      std::size_t close = MatchingBracket(region, open);
      if (close == std::string_view::npos) {
        out.diagnostics.emplace_back(kDiagUnterminated);
        region = region.substr(open + 1);
      } else {
        region = region.substr(open + 1, close - open - 1);
      }
    }
    ParseEntries(region, out, malformed);
  } else {
    // Last bracketed list that contains an arrow.
    std::size_t best_open = std::string_view::npos, best_close = 0;
    for (std::size_t open = raw.find('['); open != std::string_view::npos;
         open = raw.find('[', open + 1)) {
      std::size_t close = MatchingBracket(raw, open);
      std::string_view body =
          raw.substr(open + 1, (close == std::string_view::npos ? raw.size()
                                                                : close) -
                                   open - 1);
      if (!HasArrow(body)) continue;
      best_open = open;
      best_close = close;
      if (close == std::string_view::npos) break;
      open = close;
    }
    if (best_open != std::string_view::npos) {
      if (best_close == std::string_view::npos) {
        out.diagnostics.emplace_back(kDiagUnterminated);
        region = raw.substr(best_open + 1);
      } else {
        region = raw.substr(best_open + 1, best_close - best_open - 1);
      }
      ParseEntries(region, out, malformed);
    } else {
      // Bare "a -> b" lines anywhere in the text.
      std::size_t pos = 0;
      while (pos <= raw.size()) {
        std::size_t nl = raw.find('\n', pos);
        std::string_view line =
            Trim(raw.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
        if (!line.empty() && line.front() == '-' && line.size() > 1 &&
            line[1] == ' ') {
          line = Trim(line.substr(1));
        }
        auto parts = HasArrow(line) ? SplitArrows(line) : std::vector<std::string>{};
        for (std::size_t i = 1; i < parts.size(); ++i) {
          out.relations.emplace_back(parts[i - 1], parts[i]);
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
      }
    }
  }
  if (malformed) out.diagnostics.emplace_back(kDiagMalformed);
  out.valid = !out.relations.empty();
  if (!out.valid) out.diagnostics.emplace_back(kDiagNoRelations);
  return out;
}

namespace {

// Concatenated string literals at the start of text, or nullopt when text
// does not start with one.
std::optional<std::string> ReadStringLiterals(std::string_view text) {
  std::string out;
  bool any = false;
  std::size_t i = 0;
  while (true) {
    while (i < text.size() &&
           (std::isspace(static_cast<unsigned char>(text[i])) ||
            text[i] == '(' || text[i] == ')' || text[i] == '+')) {
      ++i;
    }
    if (i >= text.size()) break;
    if (text.compare(i, 3, "\"\"\"") == 0 || text.compare(i, 3, "'''") == 0) {
      std::string_view delim = text.substr(i, 3);
      std::size_t end = text.find(delim, i + 3);
      if (end == std::string_view::npos) end = text.size();
      out += text.substr(i + 3, end - i - 3);
      i = std::min(text.size(), end + 3);
      any = true;
      continue;
    }
    char q = text[i];
    if (q != '"' && q != '\'') break;
    std::size_t j = i + 1;
    for (; j < text.size() && text[j] != q; ++j) {
      if (text[j] == '\\' && j + 1 < text.size()) {
        char e = text[++j];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: out += e;
        }
      } else {
        out += text[j];
      }
    }
    i = j + 1;
    any = true;
  }
  if (!any) return std::nullopt;
  return out;
}

}  // namespace

std::optional<std::string> ExtractNarrative(std::string_view raw) {
  static const std::regex kNarrativeDef(R"(def\s+get_narrative\s*\(\s*self\s*\)\s*:)");
  static const std::regex kNextDef(R"(\n[ \t]*(#[^\n]*\n[ \t]*)*(def|class)\s)");
  const std::size_t def = LastMatch(raw, kNarrativeDef);
  if (def == std::string_view::npos) return std::nullopt;
  std::string_view body = raw.substr(def);
  body.remove_prefix(body.find(':') + 1);
  std::cmatch m;
  if (std::regex_search(body.data(), body.data() + body.size(), m, kNextDef)) {
    body = body.substr(0, static_cast<std::size_t>(m.position()));
  }
  body = Trim(body);
  if (body.starts_with("# TODO")) body = Trim(body.substr(6));
  if (body.starts_with("return")) {
    body = Trim(body.substr(6));
    if (auto literal = ReadStringLiterals(body)) {
      std::string text(Trim(*literal));
      if (text.empty()) return std::nullopt;
      return text;
    }
  } else if (auto literal = ReadStringLiterals(body)) {
    std::string text(Trim(*literal));
    if (!text.empty()) return text;
  }
  // Free prose or comment lines.
  std::string text;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t nl = body.find('\n', pos);
    std::string_view line =
        Trim(body.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    if (line.starts_with("#")) line = Trim(line.substr(1));
    if (!line.empty() && line != "TODO") {
      if (!text.empty()) text += '\n';
      text += line;
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (text.empty()) return std::nullopt;
  return text;
}

ModelOutput ParseCompletion(std::string_view raw) {
  ModelOutput out = ExtractRelations(raw);
  out.narrative = ExtractNarrative(raw);
  return out;
}

std::string_view VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kYes: return "yes";
    case Verdict::kLargelyYes: return "largely_yes";
    case Verdict::kAmbivalent: return "ambivalent";
    case Verdict::kLargelyNo: return "largely_no";
    case Verdict::kNo: return "no";
  }
  return "";
}

namespace {

std::string NormalizeToken(std::string_view s) {
  std::string out;
  for (char c : Lower(Trim(s))) {
    if (c == '_' || c == '-' || std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      out += c;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::optional<int> LeadingInt(std::string_view s) {
  s = Trim(s);
  std::size_t i = 0;
  while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) {
    if (std::isalpha(static_cast<unsigned char>(s[i]))) return std::nullopt;
    ++i;
  }
  if (i == s.size()) return std::nullopt;
  int v = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    v = v * 10 + (s[i] - '0');
    ++i;
  }
  return v;
}

}  // namespace

JudgeVerdict ParseJudge(std::string_view raw) {
  static const std::regex kKey(
      R"(^[\s*'`>]*(answer|rationale|correct temporal links|temporal links)[\s*]*:[\s*]*(.*)$)",
      std::regex::icase);
  JudgeVerdict out;
  std::optional<std::string> answer;
  std::string* open_field = nullptr;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    std::string line(raw.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    pos = nl == std::string_view::npos ? raw.size() + 1 : nl + 1;
    std::smatch m;
    if (std::regex_match(line, m, kKey)) {
      const std::string key = Lower(m[1].str());
      const std::string value = m[2].str();
      open_field = nullptr;
      if (key == "answer") {
        if (!answer) answer = value;
      } else if (key == "rationale") {
        out.rationale = std::string(Trim(value));
        open_field = &out.rationale;
      } else if (key == "temporal links") {
        out.total_links = LeadingInt(value);
      } else {
        out.correct_links = LeadingInt(value);
      }
    } else if (open_field && !Trim(line).empty() &&
               Trim(line).find("'''") == std::string_view::npos) {
      *open_field += "\n";
      *open_field += Trim(line);
    }
  }
  if (!answer) throw ParseError("judge response has no Answer line");
  const std::string token = NormalizeToken(*answer);
  if (token == "yes") {
    out.verdict = Verdict::kYes;
  } else if (token == "largely yes") {
    out.verdict = Verdict::kLargelyYes;
  } else if (token == "ambivalent") {
    out.verdict = Verdict::kAmbivalent;
  } else if (token == "largely no") {
    out.verdict = Verdict::kLargelyNo;
  } else if (token == "no") {
    out.verdict = Verdict::kNo;
  } else {
    throw ParseError("unrecognised verdict: " + std::string(Trim(*answer)));
  }
  if (!out.total_links) out.diagnostics.emplace_back("temporal link count missing");
  if (!out.correct_links) {
    out.diagnostics.emplace_back("correct temporal link count missing");
  }
  if (out.total_links && out.correct_links &&
      *out.correct_links > *out.total_links) {
    out.diagnostics.emplace_back("correct links exceed total; count dropped");
    out.correct_links.reset();
  }
  return out;
}

}  // namespace tgg
