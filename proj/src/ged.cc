#include "tgg/ged.h"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace tgg {

void DiGraph::SetEdge(int from, int to, bool on) {
  if (from == to) throw Error("DiGraph does not store self-loops");
  adj_[from * n_ + to] = on ? 1 : 0;
}

int DiGraph::EdgeCount() const {
  return static_cast<int>(std::count(adj_.begin(), adj_.end(), 1));
}

DiGraph DiGraph::From(const TemporalGraph& g) {
  DiGraph d(static_cast<int>(g.nodes().size()));
  for (const auto& e : g.edges()) {
    d.SetEdge(static_cast<int>(g.NodeIndex(e.from)),
              static_cast<int>(g.NodeIndex(e.to)));
  }
  return d;
}

std::vector<int> SolveAssignment(const std::vector<long long>& cost, int n,
                                 long long* total) {
  // Shortest augmenting path with row/column potentials, 1-based.
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1), v(n + 1);
  std::vector<int> p(n + 1), way(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<long long> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      long long delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        long long cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n);
  long long sum = 0;
  for (int j = 1; j <= n; ++j) {
    row_to_col[p[j] - 1] = j - 1;
    sum += cost[(p[j] - 1) * n + (j - 1)];
  }
  if (total) *total = sum;
  return row_to_col;
}

namespace {

DiGraph Pad(const DiGraph& g, int n) {
  DiGraph out(n);
  for (int i = 0; i < g.size(); ++i) {
    for (int j = 0; j < g.size(); ++j) {
      if (i != j && g.HasEdge(i, j)) out.SetEdge(i, j);
    }
  }
  return out;
}

class BranchAndBound {
 public:
  BranchAndBound(const DiGraph& a, const DiGraph& b, int node_cost,
                 const GedOptions& options)
      : a_(a),
        b_(b),
        n_(a.size()),
        node_cost_(node_cost),
        deadline_(std::chrono::steady_clock::now() + options.budget),
        map_(n_, -1),
        used_(n_, 0),
        degree_a_(n_),
        degree_b_(n_) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (a_.HasEdge(i, j)) ++degree_a_[i], ++degree_a_[j];
        if (b_.HasEdge(i, j)) ++degree_b_[i], ++degree_b_[j];
      }
    }
    BuildOrder();
  }

  GedResult Run() {
    GedResult result;
    if (n_ == 0) return result;
    SeedUpperBound();
    Descend(0, 0);
    result.value = best_ + node_cost_;
    result.exact = !timed_out_;
    result.expansions = expansions_;
    return result;
  }

 private:
  // Branch on the densest node first, then on nodes most connected to the
  // ones already placed, so that mismatches surface early.
  void BuildOrder() {
    std::vector<char> placed(n_, 0);
    for (int step = 0; step < n_; ++step) {
      int pick = -1, pick_links = -1;
      for (int u = 0; u < n_; ++u) {
        if (placed[u]) continue;
        int links = 0;
        for (int w : order_) {
          links += a_.HasEdge(u, w) + a_.HasEdge(w, u);
        }
        if (links > pick_links ||
            (links == pick_links && degree_a_[u] > degree_a_[pick])) {
          pick = u;
          pick_links = links;
        }
      }
      placed[pick] = 1;
      order_.push_back(pick);
    }
  }

  int Mismatch(int u, int v, int w, int x) const {
    return (a_.HasEdge(u, w) != b_.HasEdge(v, x)) +
           (a_.HasEdge(w, u) != b_.HasEdge(x, v));
  }

  // Mismatch between placing u on v and the nodes placed so far.
  int CrossCost(int u, int v, int depth) const {
    int cost = 0;
    for (int k = 0; k < depth; ++k) {
      int w = order_[k];
      cost += Mismatch(u, v, w, map_[w]);
    }
    return cost;
  }

  int FullCost(const std::vector<int>& mapping) const {
    int cost = 0;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (i != j && a_.HasEdge(i, j) != b_.HasEdge(mapping[i], mapping[j])) {
          ++cost;
        }
      }
    }
    return cost;
  }

  // Doubled per-pair costs for the unplaced nodes. rows/cols list the
  // unplaced gold and unused pred nodes.
  std::vector<long long> PairCosts(int depth, const std::vector<int>& rows,
                                   const std::vector<int>& cols) const {
    const int k = static_cast<int>(rows.size());
    std::vector<int> out_a(k), in_a(k), out_b(k), in_b(k);
    for (int r = 0; r < k; ++r) {
      for (int s = 0; s < k; ++s) {
        if (r == s) continue;
        out_a[r] += a_.HasEdge(rows[r], rows[s]);
        in_a[r] += a_.HasEdge(rows[s], rows[r]);
        out_b[r] += b_.HasEdge(cols[r], cols[s]);
        in_b[r] += b_.HasEdge(cols[s], cols[r]);
      }
    }
    std::vector<long long> cost(static_cast<std::size_t>(k) * k);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) {
        cost[r * k + c] = 2LL * CrossCost(rows[r], cols[c], depth) +
                          std::abs(out_a[r] - out_b[c]) +
                          std::abs(in_a[r] - in_b[c]);
      }
    }
    return cost;
  }

  void SeedUpperBound() {
    std::vector<int> rows(order_), cols(n_);
    std::iota(cols.begin(), cols.end(), 0);
    auto assignment = SolveAssignment(PairCosts(0, rows, cols), n_);
    std::vector<int> mapping(n_);
    for (int r = 0; r < n_; ++r) mapping[rows[r]] = cols[assignment[r]];
    int cost = FullCost(mapping);
    // Pairwise swaps until no swap helps.
    bool improved = true;
    while (improved && cost > 0) {
      improved = false;
      for (int i = 0; i < n_ && !improved; ++i) {
        for (int j = i + 1; j < n_ && !improved; ++j) {
          std::swap(mapping[i], mapping[j]);
          int c = FullCost(mapping);
          if (c < cost) {
            cost = c;
            improved = true;
          } else {
            std::swap(mapping[i], mapping[j]);
          }
        }
      }
    }
    best_ = cost;
  }

  bool OutOfTime() {
    if (timed_out_) return true;
    if ((expansions_ & 255) == 0 &&
        std::chrono::steady_clock::now() > deadline_) {
      timed_out_ = true;
    }
    return timed_out_;
  }

  void Descend(int depth, int cost) {
    ++expansions_;
    if (cost >= best_ || OutOfTime()) return;
    if (depth == n_) {
      best_ = cost;
      return;
    }
    std::vector<int> rows(order_.begin() + depth, order_.end());
    std::vector<int> cols;
    for (int v = 0; v < n_; ++v) {
      if (!used_[v]) cols.push_back(v);
    }
    // Once only isolated gold nodes remain every completion costs the same:
    // all pred edges that still touch an unused node go unmatched.
    if (std::all_of(rows.begin(), rows.end(),
                    [&](int u) { return degree_a_[u] == 0; })) {
      int rest = 0;
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
          if (b_.HasEdge(i, j) && (!used_[i] || !used_[j])) ++rest;
        }
      }
      best_ = std::min(best_, cost + rest);
      return;
    }
    const int k = static_cast<int>(rows.size());
    auto pair_costs = PairCosts(depth, rows, cols);
    long long doubled = 0;
    SolveAssignment(pair_costs, k, &doubled);
    if (cost + static_cast<int>((doubled + 1) / 2) >= best_) return;

    const int u = rows[0];
    std::vector<int> candidates(k);
    std::iota(candidates.begin(), candidates.end(), 0);
    std::stable_sort(candidates.begin(), candidates.end(), [&](int x, int y) {
      return pair_costs[x] < pair_costs[y];
    });
    bool tried_isolated = false;
    for (int c : candidates) {
      const int v = cols[c];
      // Unused isolated pred nodes are interchangeable.
      if (degree_b_[v] == 0) {
        if (tried_isolated) continue;
        tried_isolated = true;
      }
      const int child = cost + CrossCost(u, v, depth);
      if (child >= best_) continue;
      map_[u] = v;
      used_[v] = 1;
      Descend(depth + 1, child);
      used_[v] = 0;
      map_[u] = -1;
      if (timed_out_) return;
    }
  }

  const DiGraph& a_;
  const DiGraph& b_;
  const int n_;
  const int node_cost_;
  const std::chrono::steady_clock::time_point deadline_;
  std::vector<int> order_;
  std::vector<int> map_;
  std::vector<char> used_;
  std::vector<int> degree_a_, degree_b_;
  int best_ = std::numeric_limits<int>::max();
  std::uint64_t expansions_ = 0;
  bool timed_out_ = false;
};

}  // namespace

GedResult GraphEditDistance(const DiGraph& a, const DiGraph& b,
                            const GedOptions& options) {
  const int n = std::max(a.size(), b.size());
  DiGraph pa = Pad(a, n), pb = Pad(b, n);
  BranchAndBound search(pa, pb, std::abs(a.size() - b.size()), options);
  return search.Run();
}

GedResult GraphEditDistance(const TemporalGraph& a, const TemporalGraph& b,
                            const GedOptions& options) {
  return GraphEditDistance(DiGraph::From(a), DiGraph::From(b), options);
}

}  // namespace tgg
