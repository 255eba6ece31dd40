// Exact graph edit distance between unlabeled directed graphs.
//
// Cost model: inserting or deleting a node costs 1, inserting or deleting an
// edge costs 1, relabelling is free. The distance is the cheapest edit
// sequence that turns one graph into a graph isomorphic to the other, so
// it is symmetric and zero exactly on isomorphic pairs.
//
// With free substitution the problem reduces to padding both graphs to the
// same order with isolated nodes and minimising, over bijections p,
//
//   |n_a - n_b| + #{(i, j) : a(i, j) != b(p(i), p(j))}.
//
// The minimisation is a depth-first branch and bound. The bound at a search
// node solves a linear assignment over the unmatched nodes whose cost
// combines the exact mismatch against already matched nodes with half of
// the in/out degree gap inside the unmatched remainder.

#ifndef TGG_GED_H_
#define TGG_GED_H_

#include <chrono>
#include <cstdint>
#include <vector>

#include "tgg/graph.h"

namespace tgg {

// Dense loop-free digraph on nodes 0..n-1.
class DiGraph {
 public:
  DiGraph() = default;
  explicit DiGraph(int n) : n_(n), adj_(static_cast<std::size_t>(n) * n) {}

  int size() const { return n_; }
  bool HasEdge(int from, int to) const { return adj_[from * n_ + to] != 0; }
  void SetEdge(int from, int to, bool on = true);
  int EdgeCount() const;

  static DiGraph From(const TemporalGraph& g);

 private:
  int n_ = 0;
  std::vector<std::uint8_t> adj_;
};

struct GedOptions {
  std::chrono::milliseconds budget{10000};
};

struct GedResult {
  int value = 0;
  // False when the budget ran out; value is then an upper bound.
  bool exact = true;
  std::uint64_t expansions = 0;
};

GedResult GraphEditDistance(const DiGraph& a, const DiGraph& b,
                            const GedOptions& options = {});
GedResult GraphEditDistance(const TemporalGraph& a, const TemporalGraph& b,
                            const GedOptions& options = {});

// Minimum-cost perfect matching on a square cost matrix (row-major).
// Returns the column assigned to each row.
std::vector<int> SolveAssignment(const std::vector<long long>& cost, int n,
                                 long long* total = nullptr);

}  // namespace tgg

#endif  // TGG_GED_H_
