#include "rig/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "rig/rng.hpp"

namespace rig {

namespace {

// Builds the V-side CSR from edges that already arrive grouped by community
// (ascending) with members ascending inside each group. Counting sort by v
// keeps the per-row community ids ascending for free.
void build_v_side(BipartiteGraph& g,
                  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& vu_edges) {
  g.v_off.assign(g.n + 1, 0);
  for (auto [v, uc] : vu_edges) ++g.v_off[v + 1];
  for (std::uint32_t v = 0; v < g.n; ++v) g.v_off[v + 1] += g.v_off[v];
  g.v_adj.resize(vu_edges.size());
  std::vector<std::uint32_t> cursor(g.v_off.begin(), g.v_off.end() - 1);
  for (auto [v, uc] : vu_edges) g.v_adj[cursor[v]++] = uc;
}

}  // namespace

BipartiteGraph sample_bipartite(std::uint32_t n, std::uint64_t m, double p, std::uint64_t seed) {
  if (n == 0 || m == 0) throw std::invalid_argument("sample: empty vertex side");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample: p outside [0,1]");
  BipartiteGraph g;
  g.n = n;
  g.m = m;
  g.p = p;
  g.seed = seed;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> vu_edges;  // (v, compact u)
  if (p > 0.0) {
    Rng rng(seed);
    // Slots enumerated community-major: slot = u * n + v. Both CSR sides then
    // come out sorted without comparison sorts.
    const unsigned __int128 total =
        static_cast<unsigned __int128>(n) * static_cast<unsigned __int128>(m);
    const double log_q = std::log1p(-p);  // -inf when p == 1
    unsigned __int128 idx = 0;
    bool first = true;
    std::uint64_t last_u = ~0ull;
    while (true) {
      if (p < 1.0) {
        const double skip = std::floor(std::log(rng.uniform_pos()) / log_q);
        // Guard against a skip beyond the grid before converting to integer.
        if (skip >= static_cast<double>(total)) break;
        idx += static_cast<unsigned __int128>(skip) + (first ? 0 : 1);
      } else {
        idx += first ? 0 : 1;
      }
      if (idx >= total) break;
      first = false;
      const auto u = static_cast<std::uint64_t>(idx / n);
      const auto v = static_cast<std::uint32_t>(idx % n);
      if (u != last_u) {
        g.u_label.push_back(u);
        g.u_off.push_back(static_cast<std::uint32_t>(g.u_adj.size()));
        last_u = u;
      }
      g.u_adj.push_back(v);
      vu_edges.emplace_back(v, g.u_count() - 1);
    }
  }
  g.u_off.push_back(static_cast<std::uint32_t>(g.u_adj.size()));
  build_v_side(g, vu_edges);
  return g;
}

BipartiteGraph sample_bipartite(const RegimeConfig& cfg, std::uint64_t seed) {
  return sample_bipartite(cfg.n, cfg.m, cfg.p, seed);
}

BipartiteGraph graph_from_edges(std::uint32_t n, std::uint64_t m,
                                std::vector<std::pair<std::uint32_t, std::uint64_t>> edges) {
  BipartiteGraph g;
  g.n = n;
  g.m = m;
  std::sort(edges.begin(), edges.end(),
            [](const auto& a, const auto& b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> vu_edges;
  vu_edges.reserve(edges.size());
  std::uint64_t last_u = ~0ull;
  for (auto [v, u] : edges) {
    if (v >= n || u >= m) throw std::invalid_argument("graph_from_edges: label out of range");
    if (u != last_u) {
      g.u_label.push_back(u);
      g.u_off.push_back(static_cast<std::uint32_t>(g.u_adj.size()));
      last_u = u;
    }
    g.u_adj.push_back(v);
    vu_edges.emplace_back(v, g.u_count() - 1);
  }
  g.u_off.push_back(static_cast<std::uint32_t>(g.u_adj.size()));
  build_v_side(g, vu_edges);
  return g;
}

BipartiteGraph transpose(const BipartiteGraph& b) {
  if (b.m > 0xffffffffull) throw std::invalid_argument("transpose: m too large for the V side");
  BipartiteGraph t;
  t.n = static_cast<std::uint32_t>(b.m);
  t.m = b.n;
  t.seed = b.seed;
  t.p = b.p;

  // New U side: old V vertices with degree >= 1, in label order.
  std::vector<std::uint32_t> v_compact(b.n, ~0u);
  for (std::uint32_t v = 0; v < b.n; ++v) {
    if (b.v_off[v + 1] > b.v_off[v]) {
      v_compact[v] = static_cast<std::uint32_t>(t.u_label.size());
      t.u_label.push_back(v);
    }
  }

  // New V rows are old communities, addressed by original label.
  t.v_off.assign(t.n + 1, 0);
  for (std::uint32_t uc = 0; uc < b.u_count(); ++uc)
    t.v_off[b.u_label[uc] + 1] = b.u_off[uc + 1] - b.u_off[uc];
  for (std::uint32_t r = 0; r < t.n; ++r) t.v_off[r + 1] += t.v_off[r];
  t.v_adj.resize(b.u_adj.size());
  for (std::uint32_t uc = 0; uc < b.u_count(); ++uc) {
    auto out = t.v_off[b.u_label[uc]];
    for (auto v : b.members(uc)) t.v_adj[out++] = v_compact[v];
  }

  // New U rows: per old V vertex, its community labels (ascending already).
  t.u_off.assign(t.u_label.size() + 1, 0);
  t.u_adj.resize(b.v_adj.size());
  std::uint32_t out = 0;
  for (std::uint32_t c = 0; c < t.u_label.size(); ++c) {
    const auto v = static_cast<std::uint32_t>(t.u_label[c]);
    t.u_off[c] = out;
    for (auto uc : b.communities(v)) t.u_adj[out++] = static_cast<std::uint32_t>(b.u_label[uc]);
  }
  t.u_off[t.u_label.size()] = out;
  return t;
}

bool IntersectionGraph::adjacent(std::uint32_t a, std::uint32_t b) const {
  auto row = neighbors(a);
  return std::binary_search(row.begin(), row.end(), b);
}

IntersectionGraph induce_intersection(const BipartiteGraph& b, bool with_witness) {
  IntersectionGraph g;
  g.n = b.n;
  g.has_witness = with_witness;

  // (neighbor, witness) half-edges per vertex; dedup keeps the smallest
  // community label as witness.
  std::vector<std::uint32_t> deg(b.n, 0);
  for (std::uint32_t uc = 0; uc < b.u_count(); ++uc) {
    const auto d = b.u_off[uc + 1] - b.u_off[uc];
    for (auto v : b.members(uc)) deg[v] += d - 1;
  }
  std::vector<std::uint64_t> off(b.n + 1, 0);
  for (std::uint32_t v = 0; v < b.n; ++v) off[v + 1] = off[v] + deg[v];
  std::vector<std::pair<std::uint32_t, std::uint32_t>> half(off[b.n]);  // (neighbor, uc)
  {
    std::vector<std::uint64_t> cur(off.begin(), off.end() - 1);
    for (std::uint32_t uc = 0; uc < b.u_count(); ++uc) {
      auto mem = b.members(uc);
      for (std::size_t i = 0; i < mem.size(); ++i)
        for (std::size_t j = 0; j < mem.size(); ++j) {
          if (i == j) continue;
          half[cur[mem[i]]++] = {mem[j], uc};
        }
    }
  }

  g.off.assign(b.n + 1, 0);
  for (std::uint32_t v = 0; v < b.n; ++v) {
    auto first = half.begin() + static_cast<std::ptrdiff_t>(off[v]);
    auto last = half.begin() + static_cast<std::ptrdiff_t>(off[v + 1]);
    std::sort(first, last);
    std::uint32_t kept = 0;
    for (auto it = first; it != last; ++it) {
      if (it != first && it->first == std::prev(it)->first) continue;
      g.adj.push_back(it->first);
      if (with_witness) g.witness.push_back(b.u_label[it->second]);
      ++kept;
    }
    g.off[v + 1] = g.off[v] + kept;
  }
  return g;
}

namespace {

std::uint64_t bfs(const std::vector<std::uint64_t>& starts_at,
                  const std::uint64_t target,
                  const std::uint64_t node_count,
                  auto&& for_each_neighbor) {
  const std::uint64_t src = starts_at[0];
  if (src == target) return 0;
  std::vector<std::uint32_t> dist(node_count, ~0u);
  std::vector<std::uint64_t> frontier{src}, next;
  dist[src] = 0;
  std::uint32_t d = 0;
  while (!frontier.empty()) {
    ++d;
    next.clear();
    for (auto x : frontier) {
      bool hit = false;
      for_each_neighbor(x, [&](std::uint64_t y) {
        if (dist[y] != ~0u) return;
        if (y == target) hit = true;
        dist[y] = d;
        next.push_back(y);
      });
      if (hit) return d;
    }
    frontier.swap(next);
  }
  return kInfiniteDistance;
}

}  // namespace

std::uint64_t bfs_distance_bipartite(const BipartiteGraph& b, std::uint64_t a, std::uint64_t c) {
  const std::uint64_t nodes = b.n + b.u_count();
  if (a >= nodes || c >= nodes) throw std::out_of_range("bfs: node out of range");
  return bfs({a}, c, nodes, [&](std::uint64_t x, auto&& visit) {
    if (x < b.n) {
      for (auto uc : b.communities(static_cast<std::uint32_t>(x))) visit(b.n + uc);
    } else {
      for (auto v : b.members(static_cast<std::uint32_t>(x - b.n))) visit(v);
    }
  });
}

std::uint64_t bfs_distance(const IntersectionGraph& g, std::uint32_t a, std::uint32_t b) {
  if (a >= g.n || b >= g.n) throw std::out_of_range("bfs: node out of range");
  return bfs({a}, b, g.n, [&](std::uint64_t x, auto&& visit) {
    for (auto y : g.neighbors(static_cast<std::uint32_t>(x))) visit(y);
  });
}

void dump_graph(const BipartiteGraph& b, std::ostream& out) {
  out << b.n << ' ' << b.m << ' ' << b.seed << '\n';
  for (std::uint32_t v = 0; v < b.n; ++v)
    for (auto uc : b.communities(v)) out << v << ' ' << b.u_label[uc] << '\n';
}

BipartiteGraph load_graph(std::istream& in) {
  std::uint32_t n = 0;
  std::uint64_t m = 0, seed = 0;
  if (!(in >> n >> m >> seed)) throw std::runtime_error("load_graph: bad header");
  std::vector<std::pair<std::uint32_t, std::uint64_t>> edges;
  std::uint32_t v;
  std::uint64_t u;
  while (in >> v >> u) edges.emplace_back(v, u);
  auto g = graph_from_edges(n, m, std::move(edges));
  g.seed = seed;
  return g;
}

}  // namespace rig
