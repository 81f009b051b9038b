#include "rig/exploration.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <stdexcept>

#include "rig/rng.hpp"

namespace rig {

ActiveStack::ActiveStack(std::uint32_t n)
    : fen_(n + 1, 0), vblock_(n, 0), vindex_(n, 0) {
  blocks_.reserve(64);
  live_.reserve(64);
}

void ActiveStack::fen_add(std::uint32_t id, std::int32_t d) {
  for (std::uint32_t i = id + 1; i < fen_.size(); i += i & (~i + 1))
    fen_[i] = static_cast<std::uint32_t>(static_cast<std::int64_t>(fen_[i]) + d);
}

std::uint32_t ActiveStack::fen_prefix(std::uint32_t id) const {
  std::uint32_t s = 0;
  for (std::uint32_t i = id + 1; i > 0; i -= i & (~i + 1)) s += fen_[i];
  return s;
}

std::uint32_t ActiveStack::pop_front() {
  assert(total_ > 0);
  const std::uint32_t id = live_.back();
  Block& blk = blocks_[id];
  const std::uint32_t v = buf_[blk.head];
  ++blk.head;
  if (blk.head == blk.end) live_.pop_back();
  fen_add(id, -1);
  --total_;
  vblock_[v] = 0;
  return v;
}

void ActiveStack::push_block(const std::uint32_t* v, std::uint32_t len) {
  assert(len > 0);
  const auto id = static_cast<std::uint32_t>(blocks_.size());
  const auto begin = static_cast<std::uint32_t>(buf_.size());
  for (std::uint32_t i = 0; i < len; ++i) {
    buf_.push_back(v[i]);
    vblock_[v[i]] = id + 1;
    vindex_[v[i]] = begin + i;
  }
  blocks_.push_back({begin, begin + len, begin});
  live_.push_back(id);
  fen_add(id, static_cast<std::int32_t>(len));
  total_ += len;
}

std::uint32_t ActiveStack::rank(std::uint32_t v) const {
  assert(vblock_[v] != 0);
  const std::uint32_t id = vblock_[v] - 1;
  const Block& blk = blocks_[id];
  assert(vindex_[v] >= blk.head);
  return total_ - fen_prefix(id) + (vindex_[v] - blk.head) + 1;
}

ExplorationTrace explore(const BipartiteGraph& b, const RootRule& rule) {
  const std::uint32_t n = b.n;
  if (n == 0) throw std::invalid_argument("explore: empty graph");

  ExplorationTrace t;
  t.n = n;
  t.m = b.m;
  t.order.reserve(n);
  t.is_root.reserve(n);
  t.X.reserve(n);
  t.R.reserve(n);
  t.S.reserve(n);
  t.H.reserve(n);
  t.active_after.reserve(n);
  t.step_off.reserve(n + 1);
  t.visits.reserve(b.u_count());
  t.children.reserve(n);

  ActiveStack stack(n);
  std::vector<std::uint8_t> explored(n, 0);
  std::vector<std::uint32_t> claim(n, 0);  // step at which the vertex was claimed
  std::vector<std::uint8_t> visited_u(b.u_count(), 0);

  const bool uniform = rule.mode == RootRule::Mode::UniformRandom;
  Rng rng(rule.seed);
  std::vector<std::uint32_t> pool, pos;
  if (uniform) {
    pool.resize(n);
    std::iota(pool.begin(), pool.end(), 0u);
    pos = pool;
  }
  auto pool_remove = [&](std::uint32_t v) {
    const std::uint32_t i = pos[v];
    const std::uint32_t last = pool.back();
    pool[i] = last;
    pos[last] = i;
    pool.pop_back();
  };

  std::uint32_t cursor = 0;
  std::int64_t s_val = 0, s_min = 0;
  std::uint64_t r_val = 0;
  std::vector<std::int64_t> hstack;
  std::vector<std::uint32_t> nk;

  for (std::uint32_t k = 1; k <= n; ++k) {
    std::uint32_t vk;
    const bool root = stack.empty();
    if (!root) {
      vk = stack.pop_front();
    } else if (uniform) {
      vk = pool[rng.below(pool.size())];
    } else {
      while (explored[cursor]) ++cursor;
      vk = cursor;
    }
    if (uniform && root) pool_remove(vk);
    explored[vk] = 1;
    t.order.push_back(vk);
    t.is_root.push_back(root ? 1 : 0);

    while (!hstack.empty() && hstack.back() > s_val) hstack.pop_back();
    hstack.push_back(s_val);
    t.H.push_back(static_cast<std::uint32_t>(hstack.size()));

    t.step_off.push_back(static_cast<std::uint32_t>(t.visits.size()));
    std::uint32_t x = 0;
    nk.clear();
    for (std::uint32_t uc : b.communities(vk)) {
      if (visited_u[uc]) continue;
      visited_u[uc] = 1;
      ++x;
      const auto coff = static_cast<std::uint32_t>(t.children.size());
      for (std::uint32_t w : b.members(uc)) {
        if (w == vk || explored[w] || stack.active(w) || claim[w] == k) continue;
        claim[w] = k;
        t.children.push_back(w);
        nk.push_back(w);
        if (uniform) pool_remove(w);
      }
      t.visits.push_back(
          {uc, coff, static_cast<std::uint32_t>(t.children.size()) - coff});
    }

    r_val += x;
    s_val += static_cast<std::int64_t>(nk.size()) - 1;
    t.X.push_back(x);
    t.R.push_back(r_val);
    t.S.push_back(s_val);
    if (!nk.empty()) {
      std::sort(nk.begin(), nk.end());
      stack.push_block(nk.data(), static_cast<std::uint32_t>(nk.size()));
    }
    t.active_after.push_back(stack.size());
    if (s_val < s_min) {
      s_min = s_val;
      t.comp_bounds.push_back(k);
    }
  }
  t.step_off.push_back(static_cast<std::uint32_t>(t.visits.size()));
  t.isolated_u = b.m - r_val;
  return t;
}

std::vector<std::uint32_t> height_from_walk(const std::vector<std::int64_t>& s) {
  std::vector<std::uint32_t> h;
  h.reserve(s.size());
  std::vector<std::int64_t> st;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const std::int64_t prev = k == 0 ? 0 : s[k - 1];
    while (!st.empty() && st.back() > prev) st.pop_back();
    st.push_back(prev);
    h.push_back(static_cast<std::uint32_t>(st.size()));
  }
  return h;
}

std::vector<std::int64_t> active_counts(const std::vector<std::int64_t>& s) {
  std::vector<std::int64_t> a;
  a.reserve(s.size());
  std::int64_t mn = 0;
  for (const std::int64_t v : s) {
    mn = std::min(mn, v);
    a.push_back(v - mn);
  }
  return a;
}

std::vector<ComponentInfo> components(const ExplorationTrace& t) {
  std::vector<ComponentInfo> out;
  out.reserve(t.comp_bounds.size());
  std::uint32_t prev = 0;
  for (const std::uint32_t k : t.comp_bounds) {
    ComponentInfo c;
    c.first_step = prev + 1;
    c.last_step = k;
    c.v_size = k - prev;
    c.u_size = t.R[k - 1] - (prev > 0 ? t.R[prev - 1] : 0);
    out.push_back(c);
    prev = k;
  }
  return out;
}

std::vector<std::uint32_t> by_size_desc(const std::vector<ComponentInfo>& comps) {
  std::vector<std::uint32_t> idx(comps.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
    return comps[a].v_size > comps[b].v_size;
  });
  return idx;
}

ForestDepths forest_depths(const ExplorationTrace& t) {
  ForestDepths d;
  d.v_depth.assign(t.n, 0);
  d.u_depth.assign(t.visits.size(), 0);
  for (std::uint32_t k = 1; k <= t.n; ++k) {
    const std::uint32_t base = d.v_depth[t.order[k - 1]];
    for (std::uint32_t vi = t.step_off[k - 1]; vi < t.step_off[k]; ++vi) {
      d.u_depth[vi] = base + 1;
      const CommunityVisit& cv = t.visits[vi];
      for (std::uint32_t c = 0; c < cv.child_count; ++c)
        d.v_depth[t.children[cv.child_off + c]] = base + 2;
    }
  }
  return d;
}

}  // namespace rig
