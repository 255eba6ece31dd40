#include "tgg/graph.h"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <queue>

namespace tgg {

std::string_view DomainName(Domain d) {
  return d == Domain::kDaily ? "daily" : "news";
}

Domain ParseDomain(std::string_view s) {
  if (s == "daily") return Domain::kDaily;
  if (s == "news") return Domain::kNews;
  throw Error("unknown domain: " + std::string(s));
}

std::string_view SplitName(Split s) {
  return s == Split::kTrain ? "train" : "eval";
}

Split ParseSplit(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "eval" || s == "test" || s == "dev") return Split::kEval;
  throw Error("unknown split: " + std::string(s));
}

std::string_view InputFormatName(InputFormat f) {
  return f == InputFormat::kAlphabetical ? "alphabetical" : "descriptive";
}

InputFormat ParseInputFormat(std::string_view s) {
  if (s == "alphabetical") return InputFormat::kAlphabetical;
  if (s == "descriptive") return InputFormat::kDescriptive;
  throw Error("unknown input format: " + std::string(s));
}

std::vector<EventId> Scenario::EventIds() const {
  std::vector<EventId> ids;
  ids.reserve(events.size());
  for (const auto& e : events) ids.push_back(e.id);
  return ids;
}

EdgeSet Scenario::GoldEdgeSet() const {
  return EdgeSet(gold_edges.begin(), gold_edges.end());
}

const Event* Scenario::FindEvent(std::string_view id) const {
  for (const auto& e : events) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

namespace {

bool IsBlank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

void ValidateScenario(const Scenario& s) {
  std::set<std::string_view> ids;
  for (const auto& e : s.events) {
    if (!ids.insert(e.id).second) {
      throw Error("scenario " + s.id + ": duplicate event id " + e.id);
    }
    if (IsBlank(e.description)) {
      throw Error("scenario " + s.id + ": event " + e.id +
                  " has an empty description");
    }
  }
  std::set<Edge> seen;
  for (const auto& edge : s.gold_edges) {
    if (!ids.count(edge.from) || !ids.count(edge.to)) {
      throw Error("scenario " + s.id + ": edge " + edge.from + " -> " +
                  edge.to + " references an unknown event");
    }
    if (edge.from == edge.to) {
      throw Error("scenario " + s.id + ": self-loop on " + edge.from);
    }
    if (!seen.insert(edge).second) {
      throw Error("scenario " + s.id + ": duplicate edge " + edge.from +
                  " -> " + edge.to);
    }
  }
  if (!IsAcyclic(GoldGraph(s))) {
    throw Error("scenario " + s.id + ": gold graph has a cycle");
  }
}

TemporalGraph::TemporalGraph(const std::vector<std::string>& nodes) {
  for (const auto& n : nodes) AddNode(n);
}

void TemporalGraph::AddNode(const std::string& node) {
  if (index_.count(node)) return;
  index_.emplace(node, nodes_.size());
  nodes_.push_back(node);
}

void TemporalGraph::AddEdge(const std::string& from, const std::string& to) {
  AddNode(from);
  AddNode(to);
  if (from == to) {
    self_loops_.insert({from, to});
  } else {
    edges_.insert({from, to});
  }
}

bool TemporalGraph::HasNode(std::string_view node) const {
  return index_.find(node) != index_.end();
}

std::size_t TemporalGraph::NodeIndex(std::string_view node) const {
  auto it = index_.find(node);
  if (it == index_.end()) throw Error("unknown node " + std::string(node));
  return it->second;
}

LabelAssignment::LabelAssignment(
    InputFormat format, std::vector<std::pair<std::string, EventId>> bindings)
    : format_(format), bindings_(std::move(bindings)) {
  for (const auto& [label, event] : bindings_) {
    if (!by_label_.emplace(label, event).second) {
      throw Error("label assigned twice: " + label);
    }
    if (!by_event_.emplace(event, label).second) {
      throw Error("event labelled twice: " + event);
    }
  }
}

std::optional<EventId> LabelAssignment::EventFor(std::string_view label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> LabelAssignment::LabelFor(
    std::string_view event) const {
  auto it = by_event_.find(event);
  if (it == by_event_.end()) return std::nullopt;
  return it->second;
}

CanonicalGraph Canonicalize(const std::vector<Relation>& raw_relations,
                            const LabelAssignment& assignment,
                            const std::vector<EventId>& all_events) {
  CanonicalGraph out;
  out.graph = TemporalGraph(all_events);
  out.valid = !raw_relations.empty();
  auto resolve = [&](const std::string& label) {
    if (auto event = assignment.EventFor(label)) return *event;
    if (std::find(out.unknown_labels.begin(), out.unknown_labels.end(),
                  label) == out.unknown_labels.end()) {
      out.unknown_labels.push_back(label);
    }
    return std::string(kHallucinatedPrefix) + label;
  };
  for (const auto& [from, to] : raw_relations) {
    out.graph.AddEdge(resolve(from), resolve(to));
  }
  return out;
}

std::vector<Relation> RelationsInLabelSpace(const TemporalGraph& g,
                                            const LabelAssignment& assignment) {
  auto label = [&](const std::string& node) {
    if (node.starts_with(kHallucinatedPrefix)) {
      return node.substr(kHallucinatedPrefix.size());
    }
    if (auto l = assignment.LabelFor(node)) return *l;
    return node;
  };
  std::vector<Relation> out;
  for (const auto& e : g.edges()) out.emplace_back(label(e.from), label(e.to));
  for (const auto& e : g.self_loops()) {
    out.emplace_back(label(e.from), label(e.to));
  }
  return out;
}

std::size_t WeakComponents(const TemporalGraph& g) {
  const std::size_t n = g.nodes().size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::size_t components = n;
  for (const auto& e : g.edges()) {
    auto a = find(g.NodeIndex(e.from));
    auto b = find(g.NodeIndex(e.to));
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

std::size_t WeakComponents(const CanonicalGraph& g,
                           InvalidComponents convention) {
  if (!g.valid && convention == InvalidComponents::kZero) return 0;
  return WeakComponents(g.graph);
}

namespace {

struct Degrees {
  std::vector<std::size_t> in, out;
};

Degrees ComputeDegrees(const TemporalGraph& g) {
  Degrees d{std::vector<std::size_t>(g.nodes().size()),
            std::vector<std::size_t>(g.nodes().size())};
  for (const auto& e : g.edges()) {
    ++d.out[g.NodeIndex(e.from)];
    ++d.in[g.NodeIndex(e.to)];
  }
  return d;
}

}  // namespace

bool IsAcyclic(const TemporalGraph& g) {
  const std::size_t n = g.nodes().size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indeg(n);
  for (const auto& e : g.edges()) {
    succ[g.NodeIndex(e.from)].push_back(g.NodeIndex(e.to));
    ++indeg[g.NodeIndex(e.to)];
  }
  if (!g.self_loops().empty()) return false;
  std::queue<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.push(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto u = ready.front();
    ready.pop();
    ++visited;
    for (auto v : succ[u]) {
      if (--indeg[v] == 0) ready.push(v);
    }
  }
  return visited == n;
}

bool HasBranch(const TemporalGraph& g) {
  auto d = ComputeDegrees(g);
  for (std::size_t i = 0; i < g.nodes().size(); ++i) {
    if (d.in[i] > 1 || d.out[i] > 1) return true;
  }
  return false;
}

bool IsLinearChain(const TemporalGraph& g) {
  const std::size_t n = g.nodes().size();
  if (n == 0) return false;
  return !HasBranch(g) && g.edges().size() == n - 1 && IsAcyclic(g) &&
         WeakComponents(g) == 1;
}

TemporalGraph LinearChain(const std::vector<EventId>& order) {
  TemporalGraph g(order);
  for (std::size_t i = 1; i < order.size(); ++i) {
    g.AddEdge(order[i - 1], order[i]);
  }
  return g;
}

TemporalGraph GoldGraph(const Scenario& s) {
  TemporalGraph g(s.EventIds());
  for (const auto& e : s.gold_edges) g.AddEdge(e.from, e.to);
  return g;
}

}  // namespace tgg
