#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "udset/grid_set.hpp"
#include "udset/rng.hpp"

namespace udset {

struct CellOffset {
  int dj = 0;
  int dk = 0;
};

struct UDGraphOptions {
  std::size_t vertex_budget = 100'000'000;
};

// The graph G(N, K) on the (NK)^2 closed cells of the K-torus, with an edge
// between distinct cells that contain a pair of points at distance exactly 1.
// The graph is vertex-transitive, so it is stored as the list of neighbour
// offsets (reduced mod NK, deduplicated, excluding 0).
class UDGraph {
 public:
  UDGraph(int N, int K, const UDGraphOptions& opts = {});

  int N() const { return N_; }
  int K() const { return K_; }
  int side() const { return m_; }
  std::size_t vertex_count() const { return static_cast<std::size_t>(m_) * m_; }
  std::size_t degree() const { return stencil_.size(); }
  std::uint64_t edge_count() const { return static_cast<std::uint64_t>(vertex_count()) * degree() / 2; }
  const std::vector<CellOffset>& stencil() const { return stencil_; }

  std::uint32_t vertex(long j, long k) const;
  std::pair<int, int> cell(std::uint32_t v) const { return {static_cast<int>(v % m_), static_cast<int>(v / m_)}; }

  template <class F>
  void for_each_neighbor(std::uint32_t v, F&& f) const {
    const int j = static_cast<int>(v % m_), k = static_cast<int>(v / m_);
    for (const auto& o : stencil_) {
      int nj = j + o.dj, nk = k + o.dk;
      if (nj >= m_) nj -= m_;
      if (nk >= m_) nk -= m_;
      f(static_cast<std::uint32_t>(nk * m_ + nj));
    }
  }
  std::vector<std::uint32_t> neighbors(std::uint32_t v) const;  // sorted
  bool adjacent(std::uint32_t u, std::uint32_t v) const;

 private:
  int N_, K_, m_;
  std::vector<CellOffset> stencil_;  // dj, dk in [0, m)
  std::vector<std::uint8_t> offset_mask_;
};

// Exact integer edge test for cells at offset (p, q) (any integers, one torus
// image): dmin^2 <= N^2 <= dmax^2 in units of (1/N)^2.
bool offset_unit_linked(long p, long q, long N);

// An explicit graph for small instances and abstract tests.
class SimpleGraph {
 public:
  explicit SimpleGraph(std::size_t n) : adj_(n) {}
  void add_edge(std::uint32_t u, std::uint32_t v);
  std::size_t vertex_count() const { return adj_.size(); }
  std::uint64_t edge_count() const { return edges_; }
  template <class F>
  void for_each_neighbor(std::uint32_t v, F&& f) const {
    for (auto w : adj_[v]) f(w);
  }
  const std::vector<std::uint32_t>& neighbors(std::uint32_t v) const { return adj_[v]; }

  static SimpleGraph from(const UDGraph& g);

 private:
  std::vector<std::vector<std::uint32_t>> adj_;
  std::uint64_t edges_ = 0;
};

// Geometric constant c1 with f°(1) <= c1 e(G[F]) / (N^3 K^2): a unit-circle
// arc inside a 1/N square is convex, so its length is at most 4/N.
inline constexpr double kC1 = 1.2732395447351628;  // 4 / pi

struct SubsetStats {
  double density = 0.0;
  std::uint64_t internal_edges = 0;
  double s1_upper = 0.0;  // infinite when the subset is empty
};
SubsetStats subset_stats(const UDGraph& g, const std::vector<std::uint8_t>& members);

GridSet to_gridset(const UDGraph& g, const std::vector<std::uint8_t>& members);

template <class Graph>
std::uint64_t internal_edges(const Graph& g, const std::vector<std::uint8_t>& members) {
  std::uint64_t twice = 0;
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
    if (!members[v]) continue;
    g.for_each_neighbor(v, [&](std::uint32_t w) { twice += members[w]; });
  }
  return twice / 2;
}

template <class Graph>
bool is_maximal_independent(const Graph& g, const std::vector<std::uint8_t>& members) {
  if (internal_edges(g, members) != 0) return false;
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
    if (members[v]) continue;
    bool blocked = false;
    g.for_each_neighbor(v, [&](std::uint32_t w) { blocked = blocked || members[w]; });
    if (!blocked) return false;
  }
  return true;
}

// Adds vertices in a uniformly random order, skipping any with a chosen neighbour.
template <class Graph>
std::vector<std::uint8_t> greedy_mis(const Graph& g, std::uint64_t seed) {
  const std::size_t n = g.vertex_count();
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  shuffle(order, rng);
  std::vector<std::uint8_t> members(n, 0), blocked(n, 0);
  for (auto v : order) {
    if (blocked[v]) continue;
    members[v] = 1;
    blocked[v] = 1;
    g.for_each_neighbor(v, [&](std::uint32_t w) { blocked[w] = 1; });
  }
  return members;
}

// Heat-bath hard-core dynamics at fugacity 1: pick a uniform vertex, flip a
// fair coin; heads inserts it when no neighbour is occupied, tails removes it.
// The uniform measure on independent sets is reversible for this chain.
template <class Graph>
class GlauberChain {
 public:
  GlauberChain(const Graph& g, std::uint64_t seed)
      : g_(g), rng_(seed), members_(g.vertex_count(), 0), occupied_(g.vertex_count(), 0) {}

  void step() {
    const auto v = static_cast<std::uint32_t>(rng_.below(g_.vertex_count()));
    const bool insert = rng_.coin();
    if (insert) {
      if (members_[v] || occupied_[v] != 0) return;
      members_[v] = 1;
      g_.for_each_neighbor(v, [&](std::uint32_t w) { ++occupied_[w]; });
    } else if (members_[v]) {
      members_[v] = 0;
      g_.for_each_neighbor(v, [&](std::uint32_t w) { --occupied_[w]; });
    }
  }
  void run(std::uint64_t steps) {
    for (std::uint64_t i = 0; i < steps; ++i) step();
  }
  const std::vector<std::uint8_t>& state() const { return members_; }

 private:
  const Graph& g_;
  Rng rng_;
  std::vector<std::uint8_t> members_;
  std::vector<std::uint32_t> occupied_;
};

template <class Graph>
std::vector<std::uint8_t> glauber_sample(const Graph& g, std::uint64_t steps, std::uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("glauber_sample: steps must be >= 1");
  GlauberChain<Graph> chain(g, seed);
  chain.run(steps);
  return chain.state();
}

// Heuristic default: 100 (NK)^2 steps. No mixing guarantee.
inline std::uint64_t default_glauber_steps(const UDGraph& g) { return 100ULL * g.vertex_count(); }

struct MaxIsOptions {
  double time_limit_seconds = 60.0;
  std::uint64_t seed = 1;
  std::size_t vertex_limit = 2500;
  std::uint64_t local_search_iterations = 20000;
};

struct MaxIsResult {
  std::vector<std::uint8_t> members;
  std::size_t size = 0;
  std::size_t upper_bound = 0;  // clique-cover bound; equals size when optimal
  bool optimal = false;
  bool timed_out = false;
  std::uint64_t nodes = 0;
};

// Branch and bound (maximum clique in the complement with a greedy clique
// cover bound), started from a local-search incumbent. On timeout the best
// set and the root bound are returned with timed_out set.
MaxIsResult max_is_exact(const SimpleGraph& g, const MaxIsOptions& opts = {});
MaxIsResult max_is_exact(const UDGraph& g, const MaxIsOptions& opts = {});

struct BlockDecomposition {
  std::vector<std::vector<std::uint32_t>> blocks;  // cell indices
  std::vector<double> diameters;
  bool wraps = false;  // some 8-connected component winds around the torus
  bool has_block_structure = false;
};

// Groups occupied cells into blocks: 8-connected components, merged while two
// of them come within distance 1. The set has block structure when no block
// winds around the torus and each has diameter < 1; distinct blocks are then
// more than 1 apart by construction.
BlockDecomposition block_decomposition(const GridSet& a);

}  // namespace udset
