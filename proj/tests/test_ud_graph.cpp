#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "udset/autocorrelation.hpp"
#include "udset/constructions.hpp"
#include "udset/errors.hpp"
#include "udset/spectrum.hpp"
#include "udset/ud_graph.hpp"

using namespace udset;

namespace {

std::vector<std::uint8_t> random_members(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> out(n);
  for (auto& x : out) x = rng.uniform() < p;
  return out;
}

SimpleGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  SimpleGraph g(n);
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

unsigned mask_of(const std::vector<std::uint8_t>& members) {
  unsigned m = 0;
  for (std::size_t i = 0; i < members.size(); ++i)
    if (members[i]) m |= 1u << i;
  return m;
}

// Moser spindle as an abstract graph: two rhombi 0-1-2-3 and 0-4-5-6 sharing
// vertex 0, with tips 3 and 6 joined.
const std::vector<std::pair<int, int>> kSpindleEdges = {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}, {0, 4},
                                                        {0, 5}, {4, 5}, {4, 6}, {5, 6}, {3, 6}};

}  // namespace

TEST_CASE("edges match corner enumeration for every N K <= 12") {
  for (int N = 1; N <= 4; ++N)
    for (int K = 3; N * K <= 12; ++K) {
      const UDGraph g(N, K);
      const long m = g.side();
      std::uint64_t edges = 0;
      for (std::uint32_t u = 0; u < g.vertex_count(); ++u)
        for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
          if (u == v) continue;
          const auto [uj, uk] = g.cell(u);
          const auto [vj, vk] = g.cell(v);
          const bool expect = oracle::cells_unit_linked(uj, uk, vj, vk, m, N);
          REQUIRE(g.adjacent(u, v) == expect);
          edges += expect;
        }
      CHECK(edges / 2 == g.edge_count());
    }
}

TEST_CASE("neighbour lists are sorted and symmetric") {
  const UDGraph g(3, 4);
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
    const auto nb = g.neighbors(v);
    CHECK(std::is_sorted(nb.begin(), nb.end()));
    CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
    CHECK(std::find(nb.begin(), nb.end(), v) == nb.end());
    for (auto w : nb) CHECK(g.adjacent(w, v));
  }
}

TEST_CASE("maximum degree grows linearly in N") {
  for (int N : {8, 16, 32}) {
    const UDGraph g(N, 4);
    CHECK(g.degree() <= 20u * N);
    MESSAGE("N=" << N << " degree=" << g.degree() << " degree/N=" << double(g.degree()) / N);
  }
  CHECK_THROWS_AS(UDGraph(1, 2), std::invalid_argument);
  UDGraphOptions small;
  small.vertex_budget = 100;
  CHECK_THROWS_AS(UDGraph(4, 4, small), ResourceError);
}

TEST_CASE("cells contain unit pairs internally only for N = 1") {
  CHECK(offset_unit_linked(0, 0, 1));
  for (int N = 2; N < 10; ++N) CHECK_FALSE(offset_unit_linked(0, 0, N));
  // G(1,3): every pair of the nine cells is linked.
  const UDGraph g(1, 3);
  CHECK(g.degree() == 8);
}

TEST_CASE("subset statistics") {
  const UDGraph g(16, 4);
  const std::vector<std::uint8_t> full(g.vertex_count(), 1);
  const auto sf = subset_stats(g, full);
  CHECK(sf.density == 1.0);
  CHECK(sf.internal_edges == g.edge_count());

  const auto half = random_members(g.vertex_count(), 0.5, 3);
  const auto sh = subset_stats(g, half);
  const auto set = to_gridset(g, half);
  CHECK(s_value(set, 1.0) <= sh.s1_upper);

  const UDGraph g64(64, 8);
  const auto raster = rasterize(hex_disk_packing(), 64, 8, 0.01);
  const std::vector<std::uint8_t> cells(raster.cells().begin(), raster.cells().end());
  const auto sr = subset_stats(g64, cells);
  CHECK(sr.internal_edges == 0);
  CHECK(sr.s1_upper == 0.0);
}

TEST_CASE("sets without internal edges have no unit pairs spectrally") {
  const auto opt = optimize_croft();
  for (const auto& p : {hex_disk_packing(), croft_tortoise(opt.x)}) {
    const auto a = rasterize(p, 16, 8, 0.01);
    const UDGraph g(16, 8);
    const std::vector<std::uint8_t> cells(a.cells().begin(), a.cells().end());
    REQUIRE(internal_edges(g, cells) == 0);
    const auto e = pair_correlation(spectrum(a, 20000), 1.0);
    CHECK(e.value <= e.rigor_bound);
    CHECK(pair_correlation_exact(a, 1.0) <= 1e-12);
  }
}

TEST_CASE("greedy maximal independent sets") {
  const UDGraph g(8, 4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = greedy_mis(g, seed);
    CHECK(is_maximal_independent(g, a));
    CHECK(greedy_mis(g, seed) == a);
  }
  CHECK(greedy_mis(g, 1) != greedy_mis(g, 2));
  const SimpleGraph edgeless(12);
  const auto all = greedy_mis(edgeless, 5);
  CHECK(std::count(all.begin(), all.end(), 1) == 12);
}

TEST_CASE("Glauber on an edgeless graph has marginals 1/2") {
  const SimpleGraph g(6);
  GlauberChain chain(g, 17);
  chain.run(1000);
  const int samples = 10000;
  std::vector<int> hits(6, 0);
  for (int s = 0; s < samples; ++s) {
    chain.run(60);
    for (int v = 0; v < 6; ++v) hits[v] += chain.state()[v];
  }
  // Six simultaneous checks: 3.5 sigma each keeps the family-wise error near 0.3%.
  const double sigma = std::sqrt(0.25 / samples);
  long pooled = 0;
  for (int v = 0; v < 6; ++v) {
    CHECK(std::fabs(hits[v] / double(samples) - 0.5) <= 3.5 * sigma);
    pooled += hits[v];
  }
  CHECK(std::fabs(pooled / (6.0 * samples) - 0.5) <= 3 * sigma);
}

TEST_CASE("Glauber on a single edge is uniform on its three independent sets") {
  const auto g = from_edges(2, {{0, 1}});
  GlauberChain chain(g, 23);
  std::map<unsigned, int> counts;
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) {
    chain.run(40);
    ++counts[mask_of(chain.state())];
  }
  CHECK(counts.count(3) == 0);
  const double sigma = std::sqrt((1.0 / 3) * (2.0 / 3) / samples);
  for (unsigned m : {0u, 1u, 2u}) CHECK(std::fabs(counts[m] / double(samples) - 1.0 / 3) <= 3 * sigma);
}

TEST_CASE("Glauber flows balance on a 5-vertex path") {
  const auto g = from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  GlauberChain chain(g, 31);
  // Flow between the empty set and {2}.
  long forward = 0, backward = 0;
  unsigned prev = mask_of(chain.state());
  for (long s = 0; s < 2000000; ++s) {
    chain.step();
    const unsigned cur = mask_of(chain.state());
    if (prev == 0u && cur == 4u) ++forward;
    if (prev == 4u && cur == 0u) ++backward;
    prev = cur;
  }
  REQUIRE(forward > 1000);
  CHECK(std::fabs(double(forward - backward)) <= 3 * std::sqrt(double(forward + backward)));
}

TEST_CASE("Glauber on G(1,3) matches exact enumeration") {
  const UDGraph g(1, 3);
  std::vector<std::pair<int, int>> edges;
  for (std::uint32_t u = 0; u < 9; ++u)
    for (auto w : g.neighbors(u))
      if (u < w) edges.emplace_back(u, w);
  const auto sets = oracle::independent_sets(9, edges);
  CHECK(sets.size() == 10);
  GlauberChain chain(g, 2024);
  std::map<unsigned, int> counts;
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) {
    chain.run(100);
    ++counts[mask_of(chain.state())];
  }
  double tv = 0.0;
  for (auto m : sets) tv += std::fabs(counts[m] / double(samples) - 1.0 / sets.size());
  tv /= 2;
  CHECK(tv <= 0.02);
}

TEST_CASE("exact maximum independent set") {
  CHECK(max_is_exact(SimpleGraph(9)).size == 9);
  const auto spindle = max_is_exact(from_edges(7, kSpindleEdges));
  CHECK(spindle.size == 2);
  CHECK(spindle.optimal);
  CHECK(oracle::brute_force_alpha(7, kSpindleEdges) == 2);

  Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 8 + static_cast<int>(rng.below(13));
    const double p = 0.1 + 0.5 * rng.uniform();
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (rng.uniform() < p) edges.emplace_back(a, b);
    const auto g = from_edges(n, edges);
    const auto r = max_is_exact(g);
    CHECK(r.optimal);
    CHECK(static_cast<int>(r.size) == oracle::brute_force_alpha(n, edges));
    CHECK(internal_edges(g, r.members) == 0);
  }
  const UDGraph ud(2, 4);
  const auto r = max_is_exact(ud);
  CHECK(internal_edges(ud, r.members) == 0);
  CHECK(r.upper_bound >= r.size);
  MaxIsOptions tight;
  tight.vertex_limit = 10;
  CHECK_THROWS_AS(max_is_exact(ud, tight), ResourceError);
}

TEST_CASE("search on 2500 cells beats the disk raster") {
  const UDGraph g(5, 10);
  MaxIsOptions opts;
  opts.time_limit_seconds = 5.0;
  const auto r = max_is_exact(g, opts);
  CHECK(internal_edges(g, r.members) == 0);
  CHECK(r.upper_bound >= r.size);
  const double found = double(r.size) / g.vertex_count();
  const double raster = density(rasterize(hex_disk_packing(), 5, 10, 0.01));
  MESSAGE("found density " << found << " raster " << raster << " bound " << double(r.upper_bound) / g.vertex_count()
                           << (r.timed_out ? " (timed out)" : ""));
  CHECK(found >= raster);
}

TEST_CASE("block decomposition") {
  const auto disk = rasterize_detailed(hex_disk_packing(), 32, 8, 0.01);
  const auto bd = block_decomposition(disk.set);
  CHECK(bd.has_block_structure);
  CHECK(static_cast<int>(bd.blocks.size()) == disk.embedding.points);
  for (double d : bd.diameters) CHECK(d < 1.0);

  const auto opt = optimize_croft();
  CHECK(block_decomposition(rasterize(croft_tortoise(opt.x), 32, 16, 0.01)).has_block_structure);

  const auto full = block_decomposition(GridSet::full(4, 4));
  CHECK_FALSE(full.has_block_structure);
  CHECK(full.wraps);

  CHECK(block_decomposition(GridSet(4, 4)).has_block_structure);

  // Two cells whose distance range straddles 1: offset (4, 0) at N = 4.
  std::vector<std::uint8_t> cells(16 * 16, 0);
  cells[0] = cells[4] = 1;
  const GridSet pair(4, 4, cells);
  CHECK(offset_unit_linked(4, 0, 4));
  const auto bp = block_decomposition(pair);
  CHECK_FALSE(bp.has_block_structure);
  CHECK(bp.blocks.size() == 1);

  // Two cells far apart form two blocks.
  cells[4] = 0;
  cells[8 * 16 + 8] = 1;
  const auto bf = block_decomposition(GridSet(4, 4, cells));
  CHECK(bf.has_block_structure);
  CHECK(bf.blocks.size() == 2);
}
