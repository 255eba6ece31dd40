// Scenario and temporal graph types shared by every stage of the harness.

#ifndef TGG_GRAPH_H_
#define TGG_GRAPH_H_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tgg {

// Base class for every error the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using EventId = std::string;

enum class Domain { kDaily, kNews };
enum class Split { kTrain, kEval };

std::string_view DomainName(Domain d);
Domain ParseDomain(std::string_view s);
std::string_view SplitName(Split s);
Split ParseSplit(std::string_view s);

struct Event {
  EventId id;
  std::string description;

  bool operator==(const Event&) const = default;
};

// A directed "happens before" link.
struct Edge {
  std::string from;
  std::string to;

  auto operator<=>(const Edge&) const = default;
};

using EdgeSet = std::set<Edge>;

// The unit of evaluation: a goal, its unordered events and the gold links.
// gold_edges keeps dataset order (deduplicated) so that demonstrations
// render their relations in a stable order.
struct Scenario {
  std::string id;
  std::string title;
  std::vector<Event> events;
  std::vector<Edge> gold_edges;
  Domain domain = Domain::kDaily;
  Split split = Split::kEval;

  bool operator==(const Scenario&) const = default;

  std::vector<EventId> EventIds() const;
  EdgeSet GoldEdgeSet() const;
  const Event* FindEvent(std::string_view id) const;
};

// Checks ids are unique, descriptions non-empty, edges reference known
// events and the gold graph is acyclic. Throws Error describing the first
// violation.
void ValidateScenario(const Scenario& s);

// Prefix given to nodes created for labels the prompt never defined.
inline constexpr std::string_view kHallucinatedPrefix = "hallucinated:";

class TemporalGraph {
 public:
  TemporalGraph() = default;
  // Nodes are kept in insertion order; duplicates are ignored.
  explicit TemporalGraph(const std::vector<std::string>& nodes);

  void AddNode(const std::string& node);
  // Adds both endpoints as nodes when missing. A self-loop is recorded in
  // self_loops() and never enters edges().
  void AddEdge(const std::string& from, const std::string& to);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const EdgeSet& edges() const { return edges_; }
  const EdgeSet& self_loops() const { return self_loops_; }
  bool HasNode(std::string_view node) const;
  std::size_t NodeIndex(std::string_view node) const;

  bool operator==(const TemporalGraph&) const = default;

 private:
  std::vector<std::string> nodes_;
  std::map<std::string, std::size_t, std::less<>> index_;
  EdgeSet edges_;
  EdgeSet self_loops_;
};

enum class InputFormat { kAlphabetical, kDescriptive };
std::string_view InputFormatName(InputFormat f);
InputFormat ParseInputFormat(std::string_view s);

// Bijection between prompt-facing method names and event ids.
class LabelAssignment {
 public:
  LabelAssignment() = default;
  LabelAssignment(InputFormat format,
                  std::vector<std::pair<std::string, EventId>> bindings);

  InputFormat format() const { return format_; }
  // (label, event id) in label order for alphabetical, event order
  // otherwise.
  const std::vector<std::pair<std::string, EventId>>& bindings() const {
    return bindings_;
  }
  std::optional<EventId> EventFor(std::string_view label) const;
  std::optional<std::string> LabelFor(std::string_view event) const;
  std::size_t size() const { return bindings_.size(); }

 private:
  InputFormat format_ = InputFormat::kAlphabetical;
  std::vector<std::pair<std::string, EventId>> bindings_;
  std::map<std::string, EventId, std::less<>> by_label_;
  std::map<EventId, std::string, std::less<>> by_event_;
};

using Relation = std::pair<std::string, std::string>;

struct CanonicalGraph {
  TemporalGraph graph;
  // False when the completion yielded no relation at all.
  bool valid = false;
  // Labels that did not resolve to an event, in first-seen order.
  std::vector<std::string> unknown_labels;
};

// Maps raw label pairs onto event ids. Total: degenerate input gives an
// edgeless graph over all_events with valid == false.
CanonicalGraph Canonicalize(const std::vector<Relation>& raw_relations,
                            const LabelAssignment& assignment,
                            const std::vector<EventId>& all_events);

// Inverse of Canonicalize for a graph it produced: edges (then self-loops)
// expressed back in label space.
std::vector<Relation> RelationsInLabelSpace(const TemporalGraph& g,
                                            const LabelAssignment& assignment);

// How an invalid (failed) generation counts toward k(G).
enum class InvalidComponents { kZero, kNodeCount };

std::size_t WeakComponents(const TemporalGraph& g);
std::size_t WeakComponents(const CanonicalGraph& g,
                           InvalidComponents convention = InvalidComponents::kZero);

bool IsAcyclic(const TemporalGraph& g);

// True when every node has in- and out-degree at most one and the graph is
// a single path (the "linear" case of the corpus statistics).
bool IsLinearChain(const TemporalGraph& g);
// True when some node has more than one successor or predecessor.
bool HasBranch(const TemporalGraph& g);

TemporalGraph LinearChain(const std::vector<EventId>& order);

TemporalGraph GoldGraph(const Scenario& s);

}  // namespace tgg

#endif  // TGG_GRAPH_H_
