#include "rig/surplus_triangles.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "rig/rng.hpp"

namespace rig {

std::uint64_t forest_edge_count(const ExplorationTrace& t) {
  // One edge per visit plus one per child.
  return t.R[t.n - 1] + t.children.size();
}

std::vector<SurplusRecord> classify_surplus(const BipartiteGraph& b,
                                            const ExplorationTrace& t) {
  if (b.n != t.n || b.m != t.m || b.u_count() != t.R[t.n - 1])
    throw std::invalid_argument("classify_surplus: trace does not match graph");

  std::vector<SurplusRecord> out;
  ActiveStack stack(b.n);
  std::vector<std::uint8_t> explored(b.n, 0);
  std::vector<std::uint32_t> claim(b.n, 0);
  std::vector<std::uint32_t> nk;

  for (std::uint32_t k = 1; k <= t.n; ++k) {
    const std::uint32_t vk = t.order[k - 1];
    if (t.is_root[k - 1]) {
      assert(stack.empty());
    } else {
      const std::uint32_t popped = stack.pop_front();
      assert(popped == vk);
      (void)popped;
    }
    explored[vk] = 1;
    nk.clear();
    for (const CommunityVisit& cv : t.step_visits(k)) {
      for (std::uint32_t w : b.members(cv.uc)) {
        if (w == vk) continue;
        if (stack.active(w)) {
          out.push_back({b.u_label[cv.uc], w, k, SurplusCase::ActiveHit, stack.rank(w)});
          continue;
        }
        if (claim[w] == k) {
          out.push_back({b.u_label[cv.uc], w, k, SurplusCase::SiblingOverlap, 0});
          continue;
        }
        // An explored vertex other than vk cannot meet a fresh community:
        // the community would have been visited when that vertex was explored.
        assert(!explored[w]);
        claim[w] = k;
        nk.push_back(w);
      }
    }
    assert(nk.size() == t.n_children(k));
    if (!nk.empty()) {
      std::sort(nk.begin(), nk.end());
      stack.push_block(nk.data(), static_cast<std::uint32_t>(nk.size()));
    }
  }
  assert(forest_edge_count(t) + out.size() == b.edge_count());
  return out;
}

SurplusMeasure point_measure(const std::vector<SurplusRecord>& records,
                             const ScalingSet& sc) {
  SurplusMeasure mu;
  mu.atoms.reserve(records.size());
  for (const SurplusRecord& r : records)
    mu.atoms.emplace_back(r.k / sc.time_scale, r.l * sc.walk_scale);
  return mu;
}

SurplusMeasure point_measure(const std::vector<SurplusRecord>& records,
                             std::uint32_t n) {
  ScalingSet sc{};
  sc.time_scale = std::pow(static_cast<double>(n), 2.0 / 3.0);
  sc.walk_scale = std::pow(static_cast<double>(n), -1.0 / 3.0);
  return point_measure(records, sc);
}

SurplusMeasure simplify(const SurplusMeasure& raw) {
  SurplusMeasure s;
  s.atoms = raw.atoms;
  std::sort(s.atoms.begin(), s.atoms.end());
  s.atoms.erase(std::unique(s.atoms.begin(), s.atoms.end()), s.atoms.end());
  s.simple = true;
  return s;
}

namespace {

std::uint64_t choose3(std::uint64_t x) {
  if (x < 3) return 0;
  const unsigned __int128 p = static_cast<unsigned __int128>(x) * (x - 1) * (x - 2) / 6;
  return static_cast<std::uint64_t>(p);
}

}  // namespace

TriangleProcess triangle_process(const ExplorationTrace& t) {
  TriangleProcess tp;
  tp.T.reserve(t.n + 1);
  tp.T.push_back(0);
  std::uint64_t acc = 0;
  for (std::uint32_t k = 1; k <= t.n; ++k) {
    for (const CommunityVisit& cv : t.step_visits(k))
      acc += choose3(static_cast<std::uint64_t>(cv.child_count) + 1);
    tp.T.push_back(acc);
  }
  return tp;
}

TriangleProcess triangle_process_swapped(const ExplorationTrace& t) {
  TriangleProcess tp;
  tp.T.reserve(t.n + 1);
  tp.T.push_back(0);
  std::uint64_t acc = 0;
  for (std::uint32_t k = 1; k <= t.n; ++k) {
    acc += choose3(t.X[k - 1]);
    tp.T.push_back(acc);
  }
  return tp;
}

namespace {

std::uint64_t common_neighbors(const IntersectionGraph& g, std::uint32_t a,
                               std::uint32_t b, const std::uint8_t* in_comp) {
  auto ra = g.neighbors(a);
  auto rb = g.neighbors(b);
  std::uint64_t c = 0;
  auto ia = ra.begin();
  auto ib = rb.begin();
  while (ia != ra.end() && ib != rb.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      if (in_comp == nullptr || in_comp[*ia]) ++c;
      ++ia;
      ++ib;
    }
  }
  return c;
}

}  // namespace

std::uint64_t count_triangles_exact(const IntersectionGraph& g) {
  std::uint64_t paths = 0;
  for (std::uint32_t v = 0; v < g.n; ++v)
    for (std::uint32_t w : g.neighbors(v)) {
      if (w <= v) continue;
      paths += common_neighbors(g, v, w, nullptr);
    }
  return paths / 3;
}

std::uint64_t count_triangles_exact(const IntersectionGraph& g,
                                    std::span<const std::uint32_t> comp) {
  std::vector<std::uint8_t> in_comp(g.n, 0);
  for (std::uint32_t v : comp) in_comp[v] = 1;
  std::uint64_t paths = 0;
  for (std::uint32_t v : comp)
    for (std::uint32_t w : g.neighbors(v)) {
      if (w <= v || !in_comp[w]) continue;
      paths += common_neighbors(g, v, w, in_comp.data());
    }
  return paths / 3;
}

ClusteringEstimate clustering_coefficient_mc(const RegimeConfig& cfg,
                                             std::uint32_t replicates,
                                             std::uint64_t seed) {
  std::vector<double> closed_r(replicates), cherries_r(replicates);
  std::uint64_t closed = 0, cherries = 0;
  for (std::uint32_t r = 0; r < replicates; ++r) {
    const BipartiteGraph b = sample_bipartite(cfg, stream_seed(seed, r));
    const IntersectionGraph g = induce_intersection(b);
    std::uint64_t c = 0;
    for (std::uint32_t v = 0; v < g.n; ++v) {
      const std::uint64_t d = g.neighbors(v).size();
      c += d * (d - 1) / 2;
    }
    const std::uint64_t x = 3 * count_triangles_exact(g);
    closed_r[r] = static_cast<double>(x);
    cherries_r[r] = static_cast<double>(c);
    closed += x;
    cherries += c;
  }
  ClusteringEstimate est;
  est.cherries = cherries;
  est.closed = closed;
  if (cherries == 0) return est;
  est.defined = true;
  est.estimate = static_cast<double>(closed) / static_cast<double>(cherries);
  double ss = 0.0;
  for (std::uint32_t r = 0; r < replicates; ++r) {
    const double d = closed_r[r] - est.estimate * cherries_r[r];
    ss += d * d;
  }
  est.se = std::sqrt(ss) / static_cast<double>(cherries);
  return est;
}

}  // namespace rig
