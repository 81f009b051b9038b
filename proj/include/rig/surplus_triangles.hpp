#pragma once
// Surplus-edge classification against an exploration trace, the rescaled
// surplus point measure, triangle-count processes, exact triangle counts,
// and a Monte Carlo clustering coefficient.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rig/exploration.hpp"
#include "rig/regimes.hpp"
#include "rig/sampler.hpp"

namespace rig {

enum class SurplusCase : std::uint8_t { ActiveHit, SiblingOverlap };

struct SurplusRecord {
  std::uint64_t u = 0;  // community label of the non-forest edge
  std::uint32_t w = 0;  // individual endpoint
  std::uint32_t k = 0;  // step at which the edge was classified
  SurplusCase kind = SurplusCase::ActiveHit;
  std::uint32_t l = 0;  // 1-based rank of w in the active list; 0 for SiblingOverlap
};

// Every non-forest edge of b yields exactly one record; ranks are taken
// against the active list after the step's vertex is removed.
std::vector<SurplusRecord> classify_surplus(const BipartiteGraph& b,
                                            const ExplorationTrace& t);

std::uint64_t forest_edge_count(const ExplorationTrace& t);

struct SurplusMeasure {
  std::vector<std::pair<double, double>> atoms;  // (rescaled step, rescaled rank)
  bool simple = false;
};

SurplusMeasure point_measure(const std::vector<SurplusRecord>& records, std::uint32_t n);
SurplusMeasure point_measure(const std::vector<SurplusRecord>& records,
                             const ScalingSet& sc);
SurplusMeasure simplify(const SurplusMeasure& raw);

struct TriangleProcess {
  std::vector<std::uint64_t> T;  // T[0] = 0; cumulative, one entry per step
};

// Increment at step k: sum over visits i of binom(1 + #children_i, 3).
TriangleProcess triangle_process(const ExplorationTrace& t);

// Role-swapped variant for traces of the transposed graph: increment at
// step k is binom(X_k, 3).
TriangleProcess triangle_process_swapped(const ExplorationTrace& t);

std::uint64_t count_triangles_exact(const IntersectionGraph& g);
std::uint64_t count_triangles_exact(const IntersectionGraph& g,
                                    std::span<const std::uint32_t> comp);

struct ClusteringEstimate {
  double estimate = 0.0;
  double se = 0.0;
  std::uint64_t cherries = 0;  // conditioning events: adjacent pairs sharing a vertex
  std::uint64_t closed = 0;
  bool defined = false;
};

// Pooled ratio estimator over fresh graphs; each two-path in each graph is
// one conditioning event. Standard error via the ratio-estimator formula.
ClusteringEstimate clustering_coefficient_mc(const RegimeConfig& cfg,
                                             std::uint32_t replicates,
                                             std::uint64_t seed);

}  // namespace rig
