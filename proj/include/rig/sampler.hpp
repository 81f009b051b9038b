#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rig/regimes.hpp"

namespace rig {

// Sparse bipartite graph. The V side (individuals) is dense, labelled
// 0..n-1. The U side (communities) is stored compactly: only communities
// with at least one member get an adjacency row, since m can reach n^2 and
// almost all communities are empty at the critical scale. u_label maps a
// compact row back to the original label in 0..m-1 and is strictly
// increasing, so compact order and label order agree.
struct BipartiteGraph {
  std::uint32_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  double p = 0.0;

  std::vector<std::uint32_t> v_off;  // size n+1
  std::vector<std::uint32_t> v_adj;  // compact U ids, strictly increasing per row
  std::vector<std::uint64_t> u_label;
  std::vector<std::uint32_t> u_off;  // size u_count()+1
  std::vector<std::uint32_t> u_adj;  // V ids, strictly increasing per row

  std::uint32_t u_count() const { return static_cast<std::uint32_t>(u_label.size()); }
  std::uint64_t edge_count() const { return v_adj.size(); }
  std::uint64_t isolated_u_count() const { return m - u_label.size(); }

  std::span<const std::uint32_t> communities(std::uint32_t v) const {
    return {v_adj.data() + v_off[v], v_adj.data() + v_off[v + 1]};
  }
  std::span<const std::uint32_t> members(std::uint32_t uc) const {
    return {u_adj.data() + u_off[uc], u_adj.data() + u_off[uc + 1]};
  }
};

// Every one of the n*m slots carries an edge independently with probability
// p. Runs in expected O(E) via geometric skips over the slot grid; never
// enumerates slots one by one.
BipartiteGraph sample_bipartite(const RegimeConfig& cfg, std::uint64_t seed);

// Explicit-parameter variant used by tests and fixtures.
BipartiteGraph sample_bipartite(std::uint32_t n, std::uint64_t m, double p, std::uint64_t seed);

// Build a graph from an explicit edge list (pairs of (v, u_label)). Used for
// hand fixtures and for loading dumps.
BipartiteGraph graph_from_edges(std::uint32_t n, std::uint64_t m,
                                std::vector<std::pair<std::uint32_t, std::uint64_t>> edges);

// Role swap: communities become the explored side. Requires m to fit in 32
// bits (it does whenever a swap makes sense: heavy regime has m < n).
BipartiteGraph transpose(const BipartiteGraph& b);

// Graph on [n]: i ~ j iff they share a community. witness[e] is one shared
// community label per adjacency slot (filled only when requested).
struct IntersectionGraph {
  std::uint32_t n = 0;
  std::vector<std::uint32_t> off;  // size n+1
  std::vector<std::uint32_t> adj;  // sorted per row, no duplicates
  std::vector<std::uint64_t> witness;
  bool has_witness = false;

  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {adj.data() + off[v], adj.data() + off[v + 1]};
  }
  std::uint64_t edge_count() const { return adj.size() / 2; }
  bool adjacent(std::uint32_t a, std::uint32_t b) const;
};

IntersectionGraph induce_intersection(const BipartiteGraph& b, bool with_witness = false);

inline constexpr std::uint64_t kInfiniteDistance = ~0ull;

// BFS distance in the bipartite graph. Nodes: 0..n-1 are V, n + c addresses
// the community with compact id c.
std::uint64_t bfs_distance_bipartite(const BipartiteGraph& b, std::uint64_t a, std::uint64_t c);
std::uint64_t bfs_distance(const IntersectionGraph& g, std::uint32_t a, std::uint32_t b);

// Dump format: header "n m seed", then one "v u_label" pair per line, sorted.
void dump_graph(const BipartiteGraph& b, std::ostream& out);
BipartiteGraph load_graph(std::istream& in);

}  // namespace rig
