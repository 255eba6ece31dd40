#include <algorithm>
#include <regex>

#include "tgg/llm_client.h"

namespace tgg {

namespace {

std::string Unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      char c = s[++i];
      out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
    } else {
      out += s[i];
    }
  }
  return out;
}

// Events of s in a topological order, ties broken by dataset order.
std::vector<const Event*> TopologicalEvents(const Scenario& s) {
  std::map<EventId, int> indegree;
  for (const auto& e : s.events) indegree[e.id] = 0;
  for (const auto& e : s.gold_edges) ++indegree[e.to];
  std::vector<const Event*> order;
  std::vector<bool> done(s.events.size(), false);
  while (order.size() < s.events.size()) {
    for (std::size_t i = 0; i < s.events.size(); ++i) {
      if (done[i] || indegree[s.events[i].id] != 0) continue;
      done[i] = true;
      order.push_back(&s.events[i]);
      for (const auto& e : s.gold_edges) {
        if (e.from == s.events[i].id) --indegree[e.to];
      }
      break;
    }
  }
  return order;
}

std::string GoldNarrative(const Scenario& s) {
  auto order = TopologicalEvents(s);
  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const char* lead = i == 0                    ? "First, "
                       : i + 1 == order.size()   ? "Finally, "
                                                 : "Then, ";
    if (i) out += " ";
    out += lead + order[i]->description + ".";
  }
  return out;
}

std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? std::string("\\n") : std::string(1, c);
  }
  return out + "\"";
}

std::string RelationsMethod(const std::vector<std::pair<std::string, std::string>>& rels) {
  std::string out = "    def get_relations(self):\n        return [\n";
  for (const auto& [a, b] : rels) out += "            \"" + a + " -> " + b + "\",\n";
  return out + "        ]\n";
}

std::string NarrativeMethod(const std::string& narrative) {
  return "    def get_narrative(self):\n        return " + Quote(narrative) + "\n\n";
}

bool IsJudgePrompt(const std::string& text) {
  return text.find("\nNarrative: ") != std::string::npos &&
         text.find("\nTemporal Graph: ") != std::string::npos;
}

}  // namespace

std::string_view MockPolicyName(MockPolicy p) {
  switch (p) {
    case MockPolicy::kGold: return "gold";
    case MockPolicy::kRandomChain: return "random_chain";
    case MockPolicy::kRefusal: return "refusal";
    case MockPolicy::kScripted: return "scripted";
  }
  return "";
}

MockPolicy ParseMockPolicy(std::string_view s) {
  for (auto p : {MockPolicy::kGold, MockPolicy::kRandomChain, MockPolicy::kRefusal,
                 MockPolicy::kScripted}) {
    if (MockPolicyName(p) == s) return p;
  }
  throw Error("unknown mock policy: " + std::string(s));
}

QueryView ReadLastClass(const std::string& text) {
  static const std::regex kClass(R"((^|\n)class \w+:)");
  std::size_t start = std::string::npos;
  for (std::sregex_iterator it(text.begin(), text.end(), kClass), end; it != end; ++it) {
    start = it->position() + it->length();
  }
  if (start == std::string::npos) throw Error("prompt contains no class");
  const std::string body = text.substr(start);
  QueryView view;
  static const std::regex kTitle(R"re(\n\s+title = "((?:[^"\\]|\\.)*)")re");
  std::smatch m;
  if (std::regex_search(body, m, kTitle)) view.title = Unescape(m[1].str());
  static const std::regex kMethod(
      R"re(def (\w+)\(self\):\n\s+return "((?:[^"\\]|\\.)*)")re");
  for (std::sregex_iterator it(body.begin(), body.end(), kMethod), end; it != end; ++it) {
    const std::string name = (*it)[1].str();
    if (name == "get_narrative" || name == "get_relations") continue;
    view.methods.emplace_back(name, Unescape((*it)[2].str()));
  }
  view.wants_narrative =
      body.find("def get_narrative(self):\n        # TODO") != std::string::npos;
  view.has_relations =
      body.find("def get_relations(self):\n        # TODO") != std::string::npos;
  return view;
}

MockBackend::MockBackend(MockPolicy policy, std::vector<Scenario> registry)
    : policy_(policy), registry_(std::move(registry)) {}

void MockBackend::Script(const std::string& key_or_scenario, std::string completion) {
  scripts_[key_or_scenario] = std::move(completion);
}

const Scenario* MockBackend::Find(const std::string& title,
                                  const std::vector<std::string>& descriptions) const {
  std::vector<std::string> want = descriptions;
  std::sort(want.begin(), want.end());
  for (const auto& s : registry_) {
    if (s.title != title || s.events.size() != want.size()) continue;
    std::vector<std::string> have;
    for (const auto& e : s.events) have.push_back(e.description);
    std::sort(have.begin(), have.end());
    if (have == want) return &s;
  }
  return nullptr;
}

ChatResponse MockBackend::Complete(const ChatRequest& request) {
  ++calls_;
  const std::string& text = request.messages.back().content;
  if (policy_ == MockPolicy::kRefusal) return {std::string(kMockRefusal)};
  if (policy_ == MockPolicy::kScripted) {
    if (auto it = scripts_.find(request.Key()); it != scripts_.end()) return {it->second};
  }

  if (IsJudgePrompt(text)) {
    const auto pos = text.rfind("\nTemporal Graph: ");
    const std::string graph = text.substr(pos);
    std::size_t links = 0;
    for (std::size_t p = graph.find(" -> "); p != std::string::npos;
         p = graph.find(" -> ", p + 1)) {
      ++links;
    }
    if (policy_ == MockPolicy::kScripted) {
      throw HttpStatusError(404, "no scripted completion for judge prompt");
    }
    return {"Answer: yes\nRationale: The graph follows the narrative order.\n"
            "Temporal links: " + std::to_string(links) +
            "\nCorrect temporal links: " + std::to_string(links)};
  }

  const QueryView view = ReadLastClass(text);
  std::vector<std::string> descriptions;
  for (const auto& [label, desc] : view.methods) descriptions.push_back(desc);
  const Scenario* scenario = Find(view.title, descriptions);

  if (policy_ == MockPolicy::kScripted) {
    if (scenario) {
      if (auto it = scripts_.find(scenario->id); it != scripts_.end()) return {it->second};
    }
    throw HttpStatusError(404, "no scripted completion for '" + view.title + "'");
  }

  if (!view.has_relations) {
    // Meta prompt: narrate the implemented graph.
    if (!scenario) throw HttpStatusError(404, "unknown scenario '" + view.title + "'");
    return {GoldNarrative(*scenario)};
  }

  std::vector<std::pair<std::string, std::string>> rels;
  std::optional<std::string> narrative;
  if (policy_ == MockPolicy::kRandomChain) {
    for (std::size_t i = 1; i < view.methods.size(); ++i) {
      rels.emplace_back(view.methods[i - 1].first, view.methods[i].first);
    }
    if (view.wants_narrative) {
      narrative = "The events happen in the order they are listed.";
    }
  } else {
    if (!scenario) throw HttpStatusError(404, "unknown scenario '" + view.title + "'");
    // Bind labels to events through descriptions, consuming duplicates in
    // dataset order.
    std::map<EventId, std::string> label_of;
    std::vector<bool> used(scenario->events.size(), false);
    for (const auto& [label, desc] : view.methods) {
      for (std::size_t i = 0; i < scenario->events.size(); ++i) {
        if (!used[i] && scenario->events[i].description == desc) {
          used[i] = true;
          label_of[scenario->events[i].id] = label;
          break;
        }
      }
    }
    for (const auto& e : scenario->gold_edges) {
      rels.emplace_back(label_of.at(e.from), label_of.at(e.to));
    }
    if (view.wants_narrative) narrative = GoldNarrative(*scenario);
  }
  std::string out;
  if (narrative) out += NarrativeMethod(*narrative);
  out += RelationsMethod(rels);
  return {out};
}

}  // namespace tgg
