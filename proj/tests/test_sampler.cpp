#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "rig/regimes.hpp"
#include "rig/rng.hpp"
#include "rig/sampler.hpp"

using namespace rig;

namespace {

// Every structural invariant the CSR layout promises.
void check_csr(const BipartiteGraph& b) {
  REQUIRE(b.v_off.size() == b.n + 1);
  REQUIRE(b.v_off.front() == 0);
  REQUIRE(b.v_off.back() == b.v_adj.size());
  for (std::uint32_t v = 0; v < b.n; ++v) {
    REQUIRE(b.v_off[v] <= b.v_off[v + 1]);
    auto row = b.communities(v);
    for (std::size_t i = 0; i + 1 < row.size(); ++i) CHECK(row[i] < row[i + 1]);
    for (auto uc : row) CHECK(uc < b.u_count());
  }
  REQUIRE(b.u_label.size() + 1 == b.u_off.size());
  for (std::size_t i = 0; i + 1 < b.u_label.size(); ++i)
    CHECK(b.u_label[i] < b.u_label[i + 1]);
  for (auto lab : b.u_label) CHECK(lab < b.m);
  REQUIRE(b.u_off.front() == 0);
  REQUIRE(b.u_off.back() == b.u_adj.size());
  REQUIRE(b.u_adj.size() == b.v_adj.size());
  std::uint64_t nonempty = 0;
  for (std::uint32_t uc = 0; uc < b.u_count(); ++uc) {
    CHECK(b.u_off[uc] < b.u_off[uc + 1]);  // compact side has no empty rows
    nonempty++;
    auto row = b.members(uc);
    for (std::size_t i = 0; i + 1 < row.size(); ++i) CHECK(row[i] < row[i + 1]);
    for (auto v : row) CHECK(v < b.n);
  }
  CHECK(b.isolated_u_count() == b.m - nonempty);
  CHECK(b.edge_count() == b.v_adj.size());

  // The two incidence lists describe the same edge set.
  std::set<std::pair<std::uint32_t, std::uint64_t>> from_v, from_u;
  for (std::uint32_t v = 0; v < b.n; ++v)
    for (auto uc : b.communities(v)) from_v.insert({v, b.u_label[uc]});
  for (std::uint32_t uc = 0; uc < b.u_count(); ++uc)
    for (auto v : b.members(uc)) from_u.insert({v, b.u_label[uc]});
  CHECK(from_v == from_u);
  CHECK(from_v.size() == b.edge_count());
}

std::set<std::pair<std::uint32_t, std::uint64_t>> edge_set(const BipartiteGraph& b) {
  std::set<std::pair<std::uint32_t, std::uint64_t>> s;
  for (std::uint32_t v = 0; v < b.n; ++v)
    for (auto uc : b.communities(v)) s.insert({v, b.u_label[uc]});
  return s;
}

}  // namespace

TEST_CASE("sampler produces valid CSR across sizes and densities") {
  const std::vector<std::tuple<std::uint32_t, std::uint64_t, double, std::uint64_t>> cases = {
      {1, 1, 0.5, 1}, {7, 3, 0.9, 2}, {40, 60, 0.05, 3}, {200, 20, 0.02, 4}, {64, 4096, 0.004, 5}};
  for (auto [n, m, p, seed] : cases) {
    auto b = sample_bipartite(n, m, p, seed);
    check_csr(b);
    CHECK(b.n == n);
    CHECK(b.m == m);
    CHECK(b.p == doctest::Approx(p));
    CHECK(b.seed == seed);
  }
}

TEST_CASE("p = 1 yields the complete bipartite graph, p = 0 the empty one") {
  auto full = sample_bipartite(5, 3, 1.0, 11);
  check_csr(full);
  CHECK(full.edge_count() == 15);
  for (std::uint32_t v = 0; v < 5; ++v) CHECK(full.communities(v).size() == 3);

  auto empty = sample_bipartite(5, 3, 0.0, 11);
  check_csr(empty);
  CHECK(empty.edge_count() == 0);
  CHECK(empty.isolated_u_count() == 3);
}

TEST_CASE("sampling is deterministic in the seed") {
  auto a = sample_bipartite(50, 80, 0.03, 99);
  auto b = sample_bipartite(50, 80, 0.03, 99);
  CHECK(a.v_adj == b.v_adj);
  CHECK(a.u_adj == b.u_adj);
  CHECK(a.u_label == b.u_label);
  auto c = sample_bipartite(50, 80, 0.03, 100);
  CHECK(edge_set(a) != edge_set(c));  // astronomically unlikely to collide
}

TEST_CASE("each slot is open with probability p") {
  const double p = 0.37;
  const int reps = 3000;
  int hit = 0;
  double total = 0;
  for (int r = 0; r < reps; ++r) {
    auto b = sample_bipartite(4, 3, p, 1000 + r);
    total += static_cast<double>(b.edge_count());
    for (auto uc : b.communities(2))
      if (b.u_label[uc] == 1) hit++;
  }
  const double freq = static_cast<double>(hit) / reps;
  const double se = std::sqrt(p * (1 - p) / reps);
  CHECK(std::abs(freq - p) < 4 * se);
  const double mean_edges = total / reps;
  const double se_e = std::sqrt(12 * p * (1 - p) / reps);
  CHECK(std::abs(mean_edges - 12 * p) < 4 * se_e);
}

TEST_CASE("edge count matches Binomial(nm, p) for a sparse window config") {
  auto cfg = build_config_m(Regime::Heavy, 0.0, 40, 400);
  const double np = static_cast<double>(cfg.n) * static_cast<double>(cfg.m) * cfg.p;
  const int reps = 400;
  double total = 0;
  for (int r = 0; r < reps; ++r)
    total += static_cast<double>(sample_bipartite(cfg, 7000 + r).edge_count());
  const double se = std::sqrt(np * (1 - cfg.p) / reps);
  CHECK(std::abs(total / reps - np) < 4 * se);
}

TEST_CASE("graph_from_edges builds the same structure as the sampler path") {
  auto b = sample_bipartite(30, 25, 0.1, 42);
  std::vector<std::pair<std::uint32_t, std::uint64_t>> edges;
  for (std::uint32_t v = 0; v < b.n; ++v)
    for (auto uc : b.communities(v)) edges.push_back({v, b.u_label[uc]});
  // Shuffle and duplicate a few entries; construction must normalise both.
  Rng rng(5);
  for (std::size_t i = edges.size(); i > 1; --i)
    std::swap(edges[i - 1], edges[rng.below(i)]);
  auto dup = edges;
  for (int i = 0; i < 5 && !edges.empty(); ++i) dup.push_back(edges[rng.below(edges.size())]);

  auto g = graph_from_edges(30, 25, dup);
  check_csr(g);
  CHECK(edge_set(g) == edge_set(b));

  CHECK_THROWS_AS(graph_from_edges(4, 3, {{4, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(graph_from_edges(4, 3, {{0, 3}}), std::invalid_argument);
}

TEST_CASE("transpose swaps the two sides and is an involution on edges") {
  auto b = sample_bipartite(25, 18, 0.12, 77);
  auto t = transpose(b);
  check_csr(t);
  CHECK(t.n == b.m);
  CHECK(t.m == b.n);
  // Edge (v, label L) becomes (L, label v).
  std::set<std::pair<std::uint32_t, std::uint64_t>> swapped;
  for (auto [v, lab] : edge_set(b)) swapped.insert({static_cast<std::uint32_t>(lab), v});
  CHECK(edge_set(t) == swapped);

  auto tt = transpose(t);
  CHECK(tt.n == b.n);
  CHECK(tt.m == b.m);
  CHECK(edge_set(tt) == edge_set(b));
}

TEST_CASE("intersection graph equals the brute shared-community rule") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    auto b = sample_bipartite(28, 20, 0.12, seed);
    auto g = induce_intersection(b, true);
    REQUIRE(g.n == b.n);

    // Brute adjacency from community membership.
    std::vector<std::set<std::uint64_t>> comm(b.n);
    for (std::uint32_t v = 0; v < b.n; ++v)
      for (auto uc : b.communities(v)) comm[v].insert(b.u_label[uc]);
    std::uint64_t brute_edges = 0;
    for (std::uint32_t a = 0; a < b.n; ++a) {
      for (std::uint32_t c = a + 1; c < b.n; ++c) {
        std::vector<std::uint64_t> shared;
        std::set_intersection(comm[a].begin(), comm[a].end(), comm[c].begin(),
                              comm[c].end(), std::back_inserter(shared));
        const bool adj = !shared.empty();
        if (adj) brute_edges++;
        CHECK(g.adjacent(a, c) == adj);
        if (adj) {
          // The stored witness is a community both endpoints belong to.
          auto row = g.neighbors(a);
          for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] == c) {
              REQUIRE(g.has_witness);
              auto w = g.witness[g.off[a] + i];
              CHECK(std::find(shared.begin(), shared.end(), w) != shared.end());
            }
          }
        }
      }
    }
    CHECK(g.edge_count() == brute_edges);

    // Neighbour lists are symmetric.
    for (std::uint32_t v = 0; v < g.n; ++v)
      for (auto w : g.neighbors(v)) CHECK(g.adjacent(w, v));
  }
}

TEST_CASE("bipartite distance is exactly twice the intersection-graph distance") {
  Rng rng(314);
  for (std::uint64_t seed : {10ull, 11ull, 12ull}) {
    auto b = sample_bipartite(60, 45, 0.05, seed);
    auto g = induce_intersection(b);
    for (int q = 0; q < 60; ++q) {
      auto a = static_cast<std::uint32_t>(rng.below(b.n));
      auto c = static_cast<std::uint32_t>(rng.below(b.n));
      auto d2 = bfs_distance_bipartite(b, a, c);
      auto d1 = bfs_distance(g, a, c);
      if (d1 == kInfiniteDistance) {
        CHECK(d2 == kInfiniteDistance);
      } else {
        CHECK(d2 == 2 * d1);
      }
    }
  }
}

TEST_CASE("dump and load round-trip the graph exactly") {
  auto b = sample_bipartite(33, 27, 0.09, 123);
  std::stringstream ss;
  dump_graph(b, ss);
  auto c = load_graph(ss);
  CHECK(c.n == b.n);
  CHECK(c.m == b.m);
  CHECK(c.seed == b.seed);
  CHECK(c.v_off == b.v_off);
  CHECK(c.v_adj == b.v_adj);
  CHECK(c.u_off == b.u_off);
  CHECK(c.u_adj == b.u_adj);
  CHECK(c.u_label == b.u_label);

  std::stringstream bad("not a header\n");
  CHECK_THROWS(load_graph(bad));
}

TEST_CASE("union-find component sizes agree with a direct pairwise check") {
  auto b = sample_bipartite(50, 35, 0.06, 9);
  auto sizes = oracle::component_sizes_union_find(b);
  std::uint64_t sum = 0;
  for (auto s : sizes) sum += s;
  CHECK(sum == b.n);
  CHECK(std::is_sorted(sizes.rbegin(), sizes.rend()));

  // Count components by BFS over the intersection graph as a second opinion.
  auto g = induce_intersection(b);
  std::vector<char> seen(g.n, 0);
  std::vector<std::uint64_t> bfs_sizes;
  for (std::uint32_t s = 0; s < g.n; ++s) {
    if (seen[s]) continue;
    std::vector<std::uint32_t> stack{s};
    seen[s] = 1;
    std::uint64_t cnt = 0;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      cnt++;
      for (auto w : g.neighbors(v))
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    bfs_sizes.push_back(cnt);
  }
  std::sort(bfs_sizes.rbegin(), bfs_sizes.rend());
  CHECK(bfs_sizes == sizes);
}
