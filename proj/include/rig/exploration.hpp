#pragma once
// Stack-based exploration of the individual side of a bipartite community
// graph. Produces the walk pair (R, S), the height profile H, per-step
// community visit records, and component boundaries.

#include <cstdint>
#include <span>
#include <vector>

#include "rig/sampler.hpp"

namespace rig {

struct RootRule {
  enum class Mode { SmallestLabel, UniformRandom };
  Mode mode = Mode::UniformRandom;
  std::uint64_t seed = 0;
};

struct CommunityVisit {
  std::uint32_t uc;  // compact community id in the bipartite graph
  std::uint32_t child_off;
  std::uint32_t child_count;
};

struct ExplorationTrace {
  std::uint32_t n = 0;
  std::uint64_t m = 0;
  std::vector<std::uint32_t> order;   // order[k-1] = vertex explored at step k
  std::vector<std::uint8_t> is_root;  // 1 when the step started a new component
  std::vector<std::uint32_t> X;       // communities first visited at step k
  std::vector<std::uint64_t> R;       // running visit count
  std::vector<std::int64_t> S;        // running child count minus step count
  std::vector<std::uint32_t> H;       // height profile
  std::vector<std::uint32_t> active_after;  // active-list size after step k
  std::vector<std::uint32_t> step_off;      // size n+1, slices visits per step
  std::vector<CommunityVisit> visits;
  std::vector<std::uint32_t> children;     // discovery order within each visit
  std::vector<std::uint32_t> comp_bounds;  // steps closing a component; last == n
  std::uint64_t isolated_u = 0;

  // k is 1-based throughout.
  std::span<const CommunityVisit> step_visits(std::uint32_t k) const {
    return {visits.data() + step_off[k - 1], visits.data() + step_off[k]};
  }
  std::uint32_t n_children(std::uint32_t k) const {
    return static_cast<std::uint32_t>(S[k - 1] - (k >= 2 ? S[k - 2] : 0) + 1);
  }
};

// Ordered active list: pop at the front, push a sorted block on top. Ranks
// are 1-based from the front and count blocks pushed later as being in front.
class ActiveStack {
 public:
  explicit ActiveStack(std::uint32_t n);
  bool empty() const { return total_ == 0; }
  std::uint32_t size() const { return total_; }
  std::uint32_t pop_front();
  void push_block(const std::uint32_t* v, std::uint32_t len);  // ascending ids
  bool active(std::uint32_t v) const { return vblock_[v] != 0; }
  std::uint32_t rank(std::uint32_t v) const;

 private:
  struct Block {
    std::uint32_t begin, end, head;
  };
  std::vector<std::uint32_t> buf_;
  std::vector<Block> blocks_;
  std::vector<std::uint32_t> live_;    // block ids, back = front of the list
  std::vector<std::uint32_t> fen_;     // remaining block sizes, 1-based
  std::vector<std::uint32_t> vblock_;  // block id + 1, 0 = not active
  std::vector<std::uint32_t> vindex_;
  std::uint32_t total_ = 0;

  void fen_add(std::uint32_t id, std::int32_t d);
  std::uint32_t fen_prefix(std::uint32_t id) const;  // ids 0..id inclusive
};

ExplorationTrace explore(const BipartiteGraph& b, const RootRule& rule = {});

// H_k = number of weak running minima of S_0..S_{k-1} seen from the right.
std::vector<std::uint32_t> height_from_walk(const std::vector<std::int64_t>& s);

// Active-list size after step k recovered from the walk alone.
std::vector<std::int64_t> active_counts(const std::vector<std::int64_t>& s);

struct ComponentInfo {
  std::uint32_t first_step = 0, last_step = 0;  // 1-based, inclusive
  std::uint32_t v_size = 0;
  std::uint64_t u_size = 0;
};

std::vector<ComponentInfo> components(const ExplorationTrace& t);

// Indices into components(), largest v_size first, ties by exploration order.
std::vector<std::uint32_t> by_size_desc(const std::vector<ComponentInfo>& comps);

struct ForestDepths {
  std::vector<std::uint32_t> v_depth;  // per vertex label, edges to tree root
  std::vector<std::uint32_t> u_depth;  // aligned with trace.visits
};

ForestDepths forest_depths(const ExplorationTrace& t);

}  // namespace rig
