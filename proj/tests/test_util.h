// Shared helpers and brute-force oracles for the test binaries.

#ifndef TGG_TESTS_TEST_UTIL_H_
#define TGG_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "tgg/datasets.h"
#include "tgg/ged.h"
#include "tgg/graph.h"

namespace tgg::testing {

#ifndef TGG_SOURCE_DIR
#define TGG_SOURCE_DIR "."
#endif

inline std::filesystem::path SourcePath(const std::string& rel) {
  return std::filesystem::path(TGG_SOURCE_DIR) / rel;
}

inline std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tgg-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Small digraphs as adjacency bitmasks: bit (i * n + j) is the edge i -> j.
struct SmallGraph {
  int n = 0;
  std::uint64_t bits = 0;

  bool Has(int i, int j) const { return (bits >> (i * n + j)) & 1ull; }
  int Edges() const { return __builtin_popcountll(bits); }
};

inline DiGraph ToDiGraph(const SmallGraph& g) {
  DiGraph d(g.n);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      if (g.Has(i, j)) d.SetEdge(i, j);
    }
  }
  return d;
}

inline std::uint64_t Relabel(const SmallGraph& g, const std::vector<int>& perm) {
  std::uint64_t out = 0;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      if (g.Has(i, j)) out |= 1ull << (perm[i] * g.n + perm[j]);
    }
  }
  return out;
}

// Minimum bitmask over all relabelings: equal iff isomorphic.
inline std::uint64_t CanonicalForm(const SmallGraph& g) {
  std::vector<int> perm(g.n);
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t best = UINT64_MAX;
  do {
    best = std::min(best, Relabel(g, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return g.n == 0 ? 0 : best;
}

inline bool Isomorphic(const SmallGraph& a, const SmallGraph& b) {
  return a.n == b.n && a.Edges() == b.Edges() && CanonicalForm(a) == CanonicalForm(b);
}

// One representative per isomorphism class of loop-free digraphs on n nodes.
inline std::vector<SmallGraph> NonIsomorphicDigraphs(int n) {
  std::vector<int> slots;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) slots.push_back(i * n + j);
    }
  }
  std::map<std::uint64_t, SmallGraph> classes;
  const std::uint64_t total = 1ull << slots.size();
  for (std::uint64_t m = 0; m < total; ++m) {
    SmallGraph g{n, 0};
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if ((m >> k) & 1) g.bits |= 1ull << slots[k];
    }
    const auto c = CanonicalForm(g);
    classes.emplace(c, SmallGraph{n, c});
  }
  std::vector<SmallGraph> out;
  for (auto& [c, g] : classes) out.push_back(g);
  return out;
}

// Edit distance computed directly from its definition: every partial
// injective map from a's nodes into b's nodes (unmapped nodes of a are
// deleted, unmatched nodes of b inserted), plus the edge deletions and
// insertions that map then forces.
inline int BruteForceGed(const SmallGraph& a, const SmallGraph& b) {
  int best = INT32_MAX;
  std::vector<int> map(a.n, -1);
  std::vector<bool> used(b.n, false);
  std::function<void(int)> rec = [&](int i) {
    if (i == a.n) {
      int cost = 0;
      int mapped = 0;
      for (int u = 0; u < a.n; ++u) mapped += map[u] >= 0;
      cost += (a.n - mapped) + (b.n - mapped);
      // Edges of a: kept when both ends map onto an edge of b.
      for (int u = 0; u < a.n; ++u) {
        for (int v = 0; v < a.n; ++v) {
          if (!a.Has(u, v)) continue;
          if (map[u] < 0 || map[v] < 0 || !b.Has(map[u], map[v])) ++cost;
        }
      }
      // Edges of b not produced by a kept edge are inserted.
      std::vector<int> inverse(b.n, -1);
      for (int u = 0; u < a.n; ++u) {
        if (map[u] >= 0) inverse[map[u]] = u;
      }
      for (int x = 0; x < b.n; ++x) {
        for (int y = 0; y < b.n; ++y) {
          if (!b.Has(x, y)) continue;
          if (inverse[x] < 0 || inverse[y] < 0 || !a.Has(inverse[x], inverse[y])) ++cost;
        }
      }
      best = std::min(best, cost);
      return;
    }
    map[i] = -1;
    rec(i + 1);
    for (int x = 0; x < b.n; ++x) {
      if (used[x]) continue;
      used[x] = true;
      map[i] = x;
      rec(i + 1);
      map[i] = -1;
      used[x] = false;
    }
  };
  rec(0);
  return best;
}

inline SmallGraph RandomSmallGraph(std::mt19937_64& rng, int n, double p) {
  SmallGraph g{n, 0};
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && coin(rng)) g.bits |= 1ull << (i * n + j);
    }
  }
  return g;
}

// A ProScript-shaped scenario: events 0..n-1 and a random DAG over them
// whose edges respect a hidden topological order.
inline Scenario SyntheticScenario(std::mt19937_64& rng, const std::string& id,
                                  int min_events, int max_events,
                                  double branch_p = 0.3) {
  std::uniform_int_distribution<int> size(min_events, max_events);
  const int n = size(rng);
  Scenario s;
  s.id = id;
  s.title = "routine " + id;
  s.split = Split::kEval;
  std::vector<int> topo(n);
  std::iota(topo.begin(), topo.end(), 0);
  std::shuffle(topo.begin(), topo.end(), rng);
  for (int i = 0; i < n; ++i) {
    s.events.push_back({std::to_string(i), "step " + std::to_string(i) + " of " + id});
  }
  std::bernoulli_distribution branch(branch_p);
  std::set<Edge> seen;
  for (int k = 1; k < n; ++k) {
    // Each event after the first has a predecessor earlier in topo order.
    std::uniform_int_distribution<int> pick(branch(rng) ? 0 : k - 1, k - 1);
    Edge e{std::to_string(topo[pick(rng)]), std::to_string(topo[k])};
    if (seen.insert(e).second) s.gold_edges.push_back(e);
  }
  return s;
}

inline Scenario LinearScenario(std::mt19937_64& rng, const std::string& id,
                               int n) {
  Scenario s;
  s.id = id;
  s.title = "linear " + id;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i < n; ++i) {
    s.events.push_back({"e" + std::to_string(i), "do thing " + std::to_string(i)});
  }
  for (int k = 1; k < n; ++k) {
    s.gold_edges.push_back({"e" + std::to_string(order[k - 1]), "e" + std::to_string(order[k])});
  }
  return s;
}

}  // namespace tgg::testing

#endif  // TGG_TESTS_TEST_UTIL_H_
