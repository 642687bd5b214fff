#include "udset/ud_graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "udset/errors.hpp"

namespace udset {

bool offset_unit_linked(long p, long q, long N) {
  const long dx = std::labs(p), dy = std::labs(q);
  const long lx = std::max(0L, dx - 1), ly = std::max(0L, dy - 1);
  const long hx = dx + 1, hy = dy + 1;
  const long n2 = N * N;
  return lx * lx + ly * ly <= n2 && n2 <= hx * hx + hy * hy;
}

UDGraph::UDGraph(int N, int K, const UDGraphOptions& opts) : N_(N), K_(K), m_(N * K) {
  if (N < 1 || K < 3) throw std::invalid_argument("UDGraph: need N >= 1 and K >= 3");
  if (vertex_count() > opts.vertex_budget) throw ResourceError("UDGraph: vertex budget exceeded");
  offset_mask_.assign(vertex_count(), 0);
  const long reach = N + 1;
  for (long q = -reach; q <= reach; ++q) {
    for (long p = -reach; p <= reach; ++p) {
      long a = p % m_, b = q % m_;
      if (a < 0) a += m_;
      if (b < 0) b += m_;
      if (a == 0 && b == 0) continue;
      if (offset_unit_linked(p, q, N)) offset_mask_[static_cast<std::size_t>(b) * m_ + a] = 1;
    }
  }
  for (int b = 0; b < m_; ++b)
    for (int a = 0; a < m_; ++a)
      if (offset_mask_[static_cast<std::size_t>(b) * m_ + a]) stencil_.push_back({a, b});
}

std::uint32_t UDGraph::vertex(long j, long k) const {
  j %= m_;
  k %= m_;
  if (j < 0) j += m_;
  if (k < 0) k += m_;
  return static_cast<std::uint32_t>(k * m_ + j);
}

std::vector<std::uint32_t> UDGraph::neighbors(std::uint32_t v) const {
  std::vector<std::uint32_t> out;
  out.reserve(stencil_.size());
  for_each_neighbor(v, [&](std::uint32_t w) { out.push_back(w); });
  std::sort(out.begin(), out.end());
  return out;
}

bool UDGraph::adjacent(std::uint32_t u, std::uint32_t v) const {
  const auto [uj, uk] = cell(u);
  const auto [vj, vk] = cell(v);
  int a = (vj - uj) % m_, b = (vk - uk) % m_;
  if (a < 0) a += m_;
  if (b < 0) b += m_;
  return offset_mask_[static_cast<std::size_t>(b) * m_ + a] != 0;
}

void SimpleGraph::add_edge(std::uint32_t u, std::uint32_t v) {
  if (u == v || u >= adj_.size() || v >= adj_.size()) throw std::invalid_argument("SimpleGraph: bad edge");
  auto& au = adj_[u];
  auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it != au.end() && *it == v) return;
  au.insert(it, v);
  auto& av = adj_[v];
  av.insert(std::lower_bound(av.begin(), av.end(), u), u);
  ++edges_;
}

SimpleGraph SimpleGraph::from(const UDGraph& g) {
  SimpleGraph s(g.vertex_count());
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v) s.adj_[v] = g.neighbors(v);
  s.edges_ = g.edge_count();
  return s;
}

SubsetStats subset_stats(const UDGraph& g, const std::vector<std::uint8_t>& members) {
  if (members.size() != g.vertex_count()) throw std::invalid_argument("subset_stats: size mismatch");
  SubsetStats st;
  const auto count = static_cast<double>(std::count(members.begin(), members.end(), std::uint8_t{1}));
  st.density = count / static_cast<double>(g.vertex_count());
  st.internal_edges = internal_edges(g, members);
  const double n3k2 = std::pow(static_cast<double>(g.N()), 3) * g.K() * g.K();
  st.s1_upper = st.density > 0 ? kC1 * static_cast<double>(st.internal_edges) / n3k2 / (st.density * st.density)
                               : std::numeric_limits<double>::infinity();
  return st;
}

GridSet to_gridset(const UDGraph& g, const std::vector<std::uint8_t>& members) {
  if (members.size() != g.vertex_count()) throw std::invalid_argument("to_gridset: size mismatch");
  return GridSet(g.K(), g.N(), members);
}

// ---------------------------------------------------------------------------
// Maximum independent set

namespace {

using Clock = std::chrono::steady_clock;

class Bits {
 public:
  explicit Bits(std::size_t n = 0) : w_((n + 63) / 64, 0) {}
  void set(std::size_t i) { w_[i >> 6] |= 1ULL << (i & 63); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(1ULL << (i & 63)); }
  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  bool any() const {
    for (auto w : w_)
      if (w) return true;
    return false;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  // Lowest set bit, or npos.
  std::size_t first() const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i]) return i * 64 + static_cast<std::size_t>(std::countr_zero(w_[i]));
    return static_cast<std::size_t>(-1);
  }
  void and_with(const Bits& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
  }
  void and_not(const Bits& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
  }

 private:
  std::vector<std::uint64_t> w_;
};

// Iterated local search with (1,2)-swaps, after Andrade, Resende and Werneck.
class LocalSearch {
 public:
  LocalSearch(const SimpleGraph& g, const std::vector<Bits>& adj, std::uint64_t seed)
      : g_(g), adj_(adj), rng_(seed), in_(g.vertex_count(), 0), tight_(g.vertex_count(), 0) {}

  std::vector<std::uint8_t> run(std::uint64_t iterations) {
    fill_free();
    improve();
    auto best = in_;
    std::size_t best_size = size_, current = size_;
    const std::size_t n = g_.vertex_count();
    for (std::uint64_t it = 0; it < iterations && n > 0; ++it) {
      auto saved = in_;
      auto saved_tight = tight_;
      const std::size_t saved_size = size_;
      std::uint32_t v;
      do {
        v = static_cast<std::uint32_t>(rng_.below(n));
      } while (in_[v] && size_ < n);
      force_insert(v);
      fill_free();
      improve();
      if (size_ > best_size) {
        best = in_;
        best_size = size_;
      }
      // Accept sideways and small downhill moves occasionally.
      if (size_ + 1 < current || (size_ < current && rng_.below(4) != 0)) {
        in_ = std::move(saved);
        tight_ = std::move(saved_tight);
        size_ = saved_size;
      } else {
        current = size_;
      }
    }
    return best;
  }

 private:
  void add(std::uint32_t v) {
    in_[v] = 1;
    ++size_;
    for (auto w : g_.neighbors(v)) ++tight_[w];
  }
  void remove(std::uint32_t v) {
    in_[v] = 0;
    --size_;
    for (auto w : g_.neighbors(v)) --tight_[w];
  }
  void force_insert(std::uint32_t v) {
    for (auto w : g_.neighbors(v))
      if (in_[w]) remove(w);
    add(v);
  }
  void fill_free() {
    std::vector<std::uint32_t> order(g_.vertex_count());
    std::iota(order.begin(), order.end(), 0u);
    shuffle(order, rng_);
    for (auto v : order)
      if (!in_[v] && tight_[v] == 0) add(v);
  }
  // Repeats (1,2)-swaps until none applies.
  void improve() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::uint32_t x = 0; x < g_.vertex_count(); ++x) {
        if (!in_[x]) continue;
        std::vector<std::uint32_t> cand;
        for (auto w : g_.neighbors(x))
          if (tight_[w] == 1) cand.push_back(w);
        bool done = false;
        for (std::size_t i = 0; i < cand.size() && !done; ++i)
          for (std::size_t j = i + 1; j < cand.size() && !done; ++j) {
            if (adj_[cand[i]].test(cand[j])) continue;
            remove(x);
            add(cand[i]);
            add(cand[j]);
            fill_free();
            done = changed = true;
          }
      }
    }
  }

  const SimpleGraph& g_;
  const std::vector<Bits>& adj_;
  Rng rng_;
  std::vector<std::uint8_t> in_;
  std::vector<std::uint32_t> tight_;
  std::size_t size_ = 0;
};

class BranchAndBound {
 public:
  BranchAndBound(const std::vector<Bits>& adj, std::size_t n, Clock::time_point deadline)
      : adj_(adj), n_(n), deadline_(deadline) {}

  // Greedy clique cover of P: vertices in cover order with their class index (1-based).
  void cover(const Bits& p, std::vector<std::uint32_t>& order, std::vector<std::uint32_t>& bound) const {
    order.clear();
    bound.clear();
    Bits q = p;
    std::uint32_t cls = 0;
    while (q.any()) {
      ++cls;
      Bits r = q;
      while (r.any()) {
        const auto v = r.first();
        r.reset(v);
        q.reset(v);
        order.push_back(static_cast<std::uint32_t>(v));
        bound.push_back(cls);
        r.and_with(adj_[v]);
      }
    }
  }

  void expand(Bits p) {
    if (timed_out_) return;
    if ((++nodes_ & 1023) == 0 && Clock::now() > deadline_) {
      timed_out_ = true;
      return;
    }
    std::vector<std::uint32_t> order, bound;
    cover(p, order, bound);
    for (std::size_t i = order.size(); i-- > 0;) {
      if (current_.size() + bound[i] <= best_.size()) return;
      const auto v = order[i];
      current_.push_back(v);
      Bits np = p;
      np.and_not(adj_[v]);
      np.reset(v);
      if (!np.any()) {
        if (current_.size() > best_.size()) best_ = current_;
      } else {
        expand(std::move(np));
      }
      current_.pop_back();
      if (timed_out_) return;
      p.reset(v);
    }
  }

  std::vector<std::uint32_t> best_;
  std::vector<std::uint32_t> current_;
  bool timed_out_ = false;
  std::uint64_t nodes_ = 0;

 private:
  const std::vector<Bits>& adj_;
  std::size_t n_;
  Clock::time_point deadline_;
};

}  // namespace

MaxIsResult max_is_exact(const SimpleGraph& g, const MaxIsOptions& opts) {
  const std::size_t n = g.vertex_count();
  if (n > opts.vertex_limit) throw ResourceError("max_is_exact: vertex count above the configured limit");
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(opts.time_limit_seconds));
  std::vector<Bits> adj(n, Bits(n));
  for (std::uint32_t v = 0; v < n; ++v)
    for (auto w : g.neighbors(v)) adj[v].set(w);

  MaxIsResult res;
  LocalSearch ls(g, adj, opts.seed);
  auto incumbent = ls.run(n == 0 ? 0 : opts.local_search_iterations);

  BranchAndBound bb(adj, n, deadline);
  for (std::uint32_t v = 0; v < n; ++v)
    if (incumbent[v]) bb.best_.push_back(v);
  Bits all(n);
  for (std::size_t v = 0; v < n; ++v) all.set(v);
  std::vector<std::uint32_t> order, bound;
  bb.cover(all, order, bound);
  const std::size_t root_bound = bound.empty() ? 0 : bound.back();
  if (n > 0) bb.expand(all);

  res.members.assign(n, 0);
  for (auto v : bb.best_) res.members[v] = 1;
  res.size = bb.best_.size();
  res.nodes = bb.nodes_;
  res.timed_out = bb.timed_out_;
  res.optimal = !bb.timed_out_;
  res.upper_bound = res.optimal ? res.size : std::max(root_bound, res.size);
  return res;
}

MaxIsResult max_is_exact(const UDGraph& g, const MaxIsOptions& opts) {
  if (g.vertex_count() > opts.vertex_limit) throw ResourceError("max_is_exact: vertex count above the configured limit");
  return max_is_exact(SimpleGraph::from(g), opts);
}

// ---------------------------------------------------------------------------
// Block decomposition

namespace {

struct Pt {
  long x, y;
};

long cross(Pt o, Pt a, Pt b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Squared diameter of a point set via its convex hull (monotone chain).
long squared_diameter(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end(), [](Pt a, Pt b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  pts.erase(std::unique(pts.begin(), pts.end(), [](Pt a, Pt b) { return a.x == b.x && a.y == b.y; }), pts.end());
  if (pts.size() < 3) {
    long best = 0;
    for (auto& a : pts)
      for (auto& b : pts) best = std::max(best, (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
    return best;
  }
  std::vector<Pt> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  long best = 0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j) {
      const long dx = hull[i].x - hull[j].x, dy = hull[i].y - hull[j].y;
      best = std::max(best, dx * dx + dy * dy);
    }
  return best;
}

// Union-find where each component carries the offset of its frame relative
// to its parent's frame.
struct OffsetUnionFind {
  std::vector<std::size_t> parent;
  std::vector<Pt> off;  // frame of i expressed in parent's frame
  explicit OffsetUnionFind(std::size_t n) : parent(n), off(n, Pt{0, 0}) { std::iota(parent.begin(), parent.end(), 0); }
  std::pair<std::size_t, Pt> find(std::size_t i) {
    if (parent[i] == i) return {i, Pt{0, 0}};
    auto [r, o] = find(parent[i]);
    off[i] = Pt{off[i].x + o.x, off[i].y + o.y};
    parent[i] = r;
    return {r, off[i]};
  }
  // Declares that frame(j) = frame(i) + d. Returns false on an inconsistent cycle.
  bool unite(std::size_t i, std::size_t j, Pt d) {
    auto [ri, oi] = find(i);
    auto [rj, oj] = find(j);
    // point p in j's frame -> p + d in i's frame -> p + d + oi in ri's frame; also p + oj in rj's frame.
    const Pt rel{d.x + oi.x - oj.x, d.y + oi.y - oj.y};  // frame(rj) in frame(ri)
    if (ri == rj) return rel.x == 0 && rel.y == 0;
    parent[rj] = ri;
    off[rj] = rel;
    return true;
  }
};

// Representative of d mod m in (-m/2, m/2].
long wrap_delta(long d, long m) {
  d %= m;
  if (d < 0) d += m;
  if (2 * d > m) d -= m;
  return d;
}

}  // namespace

BlockDecomposition block_decomposition(const GridSet& a) {
  BlockDecomposition out;
  const long m = a.side(), N = a.N();
  const std::size_t ncells = a.cell_count();
  constexpr std::uint32_t kNone = 0xffffffffu;
  std::vector<std::uint32_t> comp(ncells, kNone);
  std::vector<Pt> unwrapped(ncells, Pt{0, 0});
  std::vector<std::vector<std::uint32_t>> members;

  for (std::size_t start = 0; start < ncells; ++start) {
    if (!a.at(start) || comp[start] != kNone) continue;
    const auto id = static_cast<std::uint32_t>(members.size());
    members.emplace_back();
    std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(start)};
    comp[start] = id;
    unwrapped[start] = Pt{static_cast<long>(start % m), static_cast<long>(start / m)};
    while (!stack.empty()) {
      const auto c = stack.back();
      stack.pop_back();
      members[id].push_back(c);
      const Pt u = unwrapped[c];
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const Pt w{u.x + dx, u.y + dy};
          long wx = w.x % m, wy = w.y % m;
          if (wx < 0) wx += m;
          if (wy < 0) wy += m;
          const auto idx = static_cast<std::size_t>(wy * m + wx);
          if (!a.at(idx)) continue;
          if (comp[idx] == kNone) {
            comp[idx] = id;
            unwrapped[idx] = w;
            stack.push_back(static_cast<std::uint32_t>(idx));
          } else if (unwrapped[idx].x != w.x || unwrapped[idx].y != w.y) {
            out.wraps = true;
          }
        }
    }
  }

  // Boundary cells: some 8-neighbour unoccupied.
  const std::size_t ncomp = members.size();
  std::vector<std::vector<std::uint32_t>> boundary(ncomp);
  for (std::size_t c = 0; c < ncomp; ++c)
    for (auto cell : members[c]) {
      const long x = cell % m, y = cell / m;
      bool edge = false;
      for (int dy = -1; dy <= 1 && !edge; ++dy)
        for (int dx = -1; dx <= 1 && !edge; ++dx) edge = !a.contains(x + dx, y + dy);
      if (edge) boundary[c].push_back(cell);
    }

  // Bucket components by the torus cells their boundary touches; only
  // components in the same or adjacent buckets can come within distance 1.
  const long width = N + 2;
  const long nb = std::max(1L, m / width);
  auto bucket_of = [&](long x, long y) { return static_cast<std::size_t>((y * nb / m) * nb + (x * nb / m)); };
  std::vector<std::vector<std::uint32_t>> buckets(static_cast<std::size_t>(nb * nb));
  for (std::size_t c = 0; c < ncomp; ++c) {
    std::vector<std::size_t> bs;
    for (auto cell : boundary[c]) bs.push_back(bucket_of(cell % m, cell / m));
    std::sort(bs.begin(), bs.end());
    bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
    for (auto b : bs) buckets[b].push_back(static_cast<std::uint32_t>(c));
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (long by = 0; by < nb; ++by)
    for (long bx = 0; bx < nb; ++bx) {
      const auto& here = buckets[static_cast<std::size_t>(by * nb + bx)];
      for (long oy = -1; oy <= 1; ++oy)
        for (long ox = -1; ox <= 1; ++ox) {
          const long cy = ((by + oy) % nb + nb) % nb, cx = ((bx + ox) % nb + nb) % nb;
          const auto& there = buckets[static_cast<std::size_t>(cy * nb + cx)];
          for (auto i : here)
            for (auto j : there)
              if (i < j) pairs.emplace_back(i, j);
        }
    }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  OffsetUnionFind uf(ncomp);
  const long n2 = N * N;
  for (auto [i, j] : pairs) {
    for (auto ci : boundary[i]) {
      bool linked = false;
      for (auto cj : boundary[j]) {
        const long tx = wrap_delta(static_cast<long>(cj % m) - static_cast<long>(ci % m), m);
        const long ty = wrap_delta(static_cast<long>(cj / m) - static_cast<long>(ci / m), m);
        const long lx = std::max(0L, std::labs(tx) - 1), ly = std::max(0L, std::labs(ty) - 1);
        if (lx * lx + ly * ly > n2) continue;
        // cj sits at unwrapped[ci] + t in i's frame.
        const Pt d{unwrapped[ci].x + tx - unwrapped[cj].x, unwrapped[ci].y + ty - unwrapped[cj].y};
        if (!uf.unite(i, j, d)) out.wraps = true;
        linked = true;
        break;
      }
      if (linked) break;
    }
  }

  std::vector<std::size_t> root_index(ncomp, static_cast<std::size_t>(-1));
  std::vector<std::vector<Pt>> corners;
  for (std::size_t c = 0; c < ncomp; ++c) {
    auto [r, o] = uf.find(c);
    if (root_index[r] == static_cast<std::size_t>(-1)) {
      root_index[r] = out.blocks.size();
      out.blocks.emplace_back();
      corners.emplace_back();
    }
    const auto b = root_index[r];
    for (auto cell : members[c]) {
      out.blocks[b].push_back(cell);
      const Pt u{unwrapped[cell].x + o.x, unwrapped[cell].y + o.y};
      for (int q = 0; q < 4; ++q) corners[b].push_back(Pt{u.x + (q & 1), u.y + (q >> 1)});
    }
  }
  out.has_block_structure = !out.wraps;
  for (std::size_t b = 0; b < out.blocks.size(); ++b) {
    std::sort(out.blocks[b].begin(), out.blocks[b].end());
    const long d2 = squared_diameter(std::move(corners[b]));
    out.diameters.push_back(std::sqrt(static_cast<double>(d2)) / static_cast<double>(N));
    if (d2 >= n2) out.has_block_structure = false;
  }
  return out;
}

}  // namespace udset
