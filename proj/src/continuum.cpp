#include "rig/continuum.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "rig/regimes.hpp"
#include "rig/rng.hpp"
#include "rig/stats.hpp"

namespace rig {

LimitPath simulate_limit_path(const LimitParams& params, double dt, double T,
                              std::uint64_t seed, bool drift_only) {
  if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("simulate: dt, T > 0");
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  const bool two_noise = std::isfinite(params.theta);
  const double th = params.theta;

  LimitPath path;
  path.dt = dt;
  path.T = T;
  path.params = params;
  path.seed = seed;
  path.drift_only = drift_only;
  path.S.reserve(steps + 1);
  path.S.push_back(0.0);
  if (two_noise) {
    path.R.reserve(steps + 1);
    path.R.push_back(0.0);
  }

  Rng rng(seed);
  const double sd = std::sqrt(dt);
  const double q = two_noise ? std::pow(th, 0.25) : 0.0;  // theta^{1/4}
  double s = 0.0, r = 0.0;
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t0 = static_cast<double>(i - 1) * dt;
    const double t1 = static_cast<double>(i) * dt;
    const double half_sq = 0.5 * (t1 * t1 - t0 * t0);
    const double dw = drift_only ? 0.0 : rng.normal(0.0, sd);
    if (two_noise) {
      const double dws = drift_only ? 0.0 : rng.normal(0.0, sd);
      r += q * dws + std::sqrt(th) * params.lambda * dt - half_sq;
      s += dw + dws / q + 2.0 * params.lambda * dt - (1.0 + 1.0 / std::sqrt(th)) * half_sq;
      path.R.push_back(r);
    } else {
      s += dw + 2.0 * params.lambda * dt - half_sq;
    }
    path.S.push_back(s);
  }
  path.H = height_of_path(path);
  return path;
}

std::vector<double> height_of_path(const LimitPath& path) {
  const double c = std::isfinite(path.params.theta)
                       ? 2.0 / (1.0 + 1.0 / std::sqrt(path.params.theta))
                       : 2.0;
  std::vector<double> h;
  h.reserve(path.S.size());
  double mn = 0.0;
  for (const double v : path.S) {
    mn = std::min(mn, v);
    h.push_back(c * (v - mn));
  }
  return h;
}

ExcursionList excursions(const LimitPath& path, HorizonPolicy policy) {
  ExcursionList out;
  const std::size_t np = path.points();
  double mn = 0.0;
  std::size_t start = 0;  // index of the zero preceding the open block, if any
  bool open = false;
  for (std::size_t i = 0; i < np; ++i) {
    const bool above = path.S[i] > mn;
    if (above && !open) {
      open = true;
      start = i - 1;  // i >= 1: S[0] = 0 is never above its own minimum
    } else if (!above && open) {
      out.ranked.push_back({path.time(start), path.time(i), 0.0, true});
      open = false;
    }
    mn = std::min(mn, path.S[i]);
  }
  if (open) {
    out.had_incomplete = true;
    if (policy == HorizonPolicy::Truncate)
      out.ranked.push_back({path.time(start), path.T, 0.0, false});
  }
  for (Excursion& e : out.ranked) e.zeta = e.d - e.g;
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const Excursion& a, const Excursion& b) { return a.zeta > b.zeta; });
  return out;
}

namespace {

struct LocalHeights {
  const LimitPath* path;
  std::size_t ig;
  std::size_t len;  // number of grid cells, points = len + 1
  double base;

  double operator()(std::size_t i) const { return path->S[ig + i] - base; }
};

LocalHeights local_heights(const LimitPath& path, const Excursion& exc) {
  const auto ig = static_cast<std::size_t>(std::llround(exc.g / path.dt));
  const auto id = static_cast<std::size_t>(std::llround(exc.d / path.dt));
  if (id <= ig || id >= path.points())
    throw std::invalid_argument("excursion does not fit the path grid");
  return {&path, ig, id - ig, path.S[ig]};
}

}  // namespace

std::vector<std::pair<double, double>> sample_poisson_surplus(const LimitPath& path,
                                                              const Excursion& exc,
                                                              std::uint64_t seed) {
  const LocalHeights h = local_heights(path, exc);
  double peak = 0.0;
  for (std::size_t i = 0; i <= h.len; ++i) peak = std::max(peak, h(i));
  std::vector<std::pair<double, double>> atoms;
  if (peak <= 0.0) return atoms;

  Rng rng(seed);
  const double width = exc.d - exc.g;
  const std::uint64_t count = rng.poisson(width * peak);
  atoms.reserve(count);
  for (std::uint64_t a = 0; a < count; ++a) {
    const double xl = rng.uniform01() * width;
    const double y = rng.uniform01() * peak;
    auto i0 = static_cast<std::size_t>(xl / path.dt);
    i0 = std::min(i0, h.len - 1);
    const double f = xl / path.dt - static_cast<double>(i0);
    const double hx = h(i0) * (1.0 - f) + h(i0 + 1) * f;
    if (y <= hx) atoms.emplace_back(exc.g + xl, y);
  }
  std::sort(atoms.begin(), atoms.end());
  return atoms;
}

ShortcutSet shortcuts_from_atoms(const LimitPath& path, const Excursion& exc,
                                 const std::vector<std::pair<double, double>>& atoms) {
  const LocalHeights h = local_heights(path, exc);
  ShortcutSet pi;
  pi.pairs.reserve(atoms.size());
  for (const auto& [x, y] : atoms) {
    auto ix = static_cast<std::size_t>((x - exc.g) / path.dt);
    ix = std::min(ix, h.len);
    const double threshold = h(ix) - y;
    std::size_t u = ix;
    while (u > 0 && h(u) > threshold) --u;  // stops at 0: h(0) = 0 <= any threshold >= 0
    pi.pairs.emplace_back(static_cast<double>(u) * path.dt,
                          static_cast<double>(ix) * path.dt);
  }
  return pi;
}

RangeMin::RangeMin(const std::vector<double>& v) {
  table_.push_back(v);
  for (std::size_t half = 1; half * 2 <= v.size(); half *= 2) {
    const std::vector<double>& prev = table_.back();
    std::vector<double> next(v.size() - 2 * half + 1);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = std::min(prev[i], prev[i + half]);
    table_.push_back(std::move(next));
  }
}

double RangeMin::min(std::size_t i, std::size_t j) const {
  assert(i <= j && j < table_[0].size());
  const auto level = static_cast<std::size_t>(std::bit_width(j - i + 1)) - 1;
  return std::min(table_[level][i], table_[level][j + 1 - (std::size_t{1} << level)]);
}

MetricGraphSpec make_metric_spec(const LimitPath& path, const Excursion& exc,
                                 const ShortcutSet& pi) {
  const LocalHeights lh = local_heights(path, exc);
  MetricGraphSpec spec;
  spec.resolution = path.dt;
  spec.h.reserve(lh.len + 1);
  for (std::size_t i = 0; i <= lh.len; ++i) spec.h.push_back(lh(i));
  spec.pi = pi;
  spec.rmq = RangeMin(spec.h);
  return spec;
}

namespace {

std::size_t grid_index(const MetricGraphSpec& spec, double a) {
  const auto i = static_cast<std::ptrdiff_t>(std::llround(a / spec.resolution));
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(spec.h.size()) - 1));
}

double tree_distance_idx(const MetricGraphSpec& spec, std::size_t ia, std::size_t ib) {
  if (ia > ib) std::swap(ia, ib);
  return spec.h[ia] + spec.h[ib] - 2.0 * spec.rmq.min(ia, ib);
}

}  // namespace

double tree_distance(const MetricGraphSpec& spec, double a, double b) {
  return tree_distance_idx(spec, grid_index(spec, a), grid_index(spec, b));
}

double graph_distance(const MetricGraphSpec& spec, double a, double b) {
  std::vector<std::size_t> nodes{grid_index(spec, a), grid_index(spec, b)};
  nodes.reserve(2 + 2 * spec.pi.pairs.size());
  for (const auto& [s, t] : spec.pi.pairs) {
    nodes.push_back(grid_index(spec, s));
    nodes.push_back(grid_index(spec, t));
  }
  const std::size_t nn = nodes.size();
  std::vector<double> dist(nn * nn);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j)
      dist[i * nn + j] = i == j ? 0.0 : tree_distance_idx(spec, nodes[i], nodes[j]);
  for (std::size_t k = 0; k < spec.pi.pairs.size(); ++k) {
    dist[(2 + 2 * k) * nn + (3 + 2 * k)] = 0.0;  // glued pair, both directions
    dist[(3 + 2 * k) * nn + (2 + 2 * k)] = 0.0;
  }
  for (std::size_t k = 0; k < nn; ++k)
    for (std::size_t i = 0; i < nn; ++i)
      for (std::size_t j = 0; j < nn; ++j)
        dist[i * nn + j] =
            std::min(dist[i * nn + j], dist[i * nn + k] + dist[k * nn + j]);
  return dist[1];  // row 0 (a) to column 1 (b)
}

namespace {

double lerp_or_zero(const MetricGraphSpec& spec, double t) {
  if (t < 0.0 || t > spec.zeta()) return 0.0;
  const double pos = t / spec.resolution;
  const auto i0 = std::min(static_cast<std::size_t>(pos), spec.h.size() - 2);
  const double f = pos - static_cast<double>(i0);
  return spec.h[i0] * (1.0 - f) + spec.h[i0 + 1] * f;
}

double modulus(const std::vector<double>& h, std::size_t window) {
  // Max over sliding windows of (max - min); window counts grid cells.
  std::deque<std::size_t> mx, mn;
  double best = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    while (!mx.empty() && h[mx.back()] <= h[i]) mx.pop_back();
    mx.push_back(i);
    while (!mn.empty() && h[mn.back()] >= h[i]) mn.pop_back();
    mn.push_back(i);
    if (i >= window + 1) {
      if (mx.front() == i - window - 1) mx.pop_front();
      if (mn.front() == i - window - 1) mn.pop_front();
    }
    best = std::max(best, h[mx.front()] - h[mn.front()]);
  }
  return best;
}

}  // namespace

double ghp_upper_bound(const MetricGraphSpec& a, const MetricGraphSpec& b,
                       double delta) {
  if (a.pi.pairs.size() != b.pi.pairs.size())
    return std::numeric_limits<double>::infinity();
  const auto q = static_cast<double>(a.pi.pairs.size());

  double sup_diff = 0.0;
  for (std::size_t i = 0; i < a.h.size(); ++i) {
    const double t = static_cast<double>(i) * a.resolution;
    sup_diff = std::max(sup_diff, std::abs(a.h[i] - lerp_or_zero(b, t)));
  }
  for (std::size_t i = 0; i < b.h.size(); ++i) {
    const double t = static_cast<double>(i) * b.resolution;
    sup_diff = std::max(sup_diff, std::abs(lerp_or_zero(a, t) - b.h[i]));
  }

  double delta_eff = delta;
  auto pa = a.pi.pairs;
  auto pb = b.pi.pairs;
  std::sort(pa.begin(), pa.end());
  std::sort(pb.begin(), pb.end());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    delta_eff = std::max(delta_eff, std::abs(pa[i].first - pb[i].first));
    delta_eff = std::max(delta_eff, std::abs(pa[i].second - pb[i].second));
  }

  double omega = 0.0;
  if (delta_eff > 0.0 && a.h.size() >= 2) {
    // Pad with the zero extension so a nonzero boundary value is charged.
    std::vector<double> padded;
    padded.reserve(a.h.size() + 2);
    padded.push_back(0.0);
    padded.insert(padded.end(), a.h.begin(), a.h.end());
    padded.push_back(0.0);
    const auto cells = static_cast<std::size_t>(
        std::clamp(std::ceil(delta_eff / a.resolution - 1e-12), 1.0,
                   static_cast<double>(padded.size() - 1)));
    omega = modulus(padded, cells);
  }

  return 6.0 * (q + 1.0) * (sup_diff + omega) + std::abs(a.zeta() - b.zeta());
}

KappaCheckReport kappa_scaling_check(double lambda, double theta, double dt,
                                     double T, std::uint32_t replicates,
                                     std::uint64_t seed) {
  const double kappa = kappa_theta(theta);
  const LimitParams two{lambda, theta};
  const LimitParams one{lambda_theta(lambda, theta),
                        std::numeric_limits<double>::infinity()};

  KappaCheckReport rep;
  {
    const LimitPath p2 = simulate_limit_path(two, dt, T, 1, true);
    const LimitPath p1 = simulate_limit_path(one, kappa * dt, kappa * T, 1, true);
    for (std::size_t i = 0; i < p2.points(); ++i)
      rep.drift_gap = std::max(rep.drift_gap, std::abs(p2.S[i] - kappa * p1.S[i]));
  }

  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  const std::vector<std::size_t> checks{steps / 4, steps / 2, 3 * steps / 4, steps};
  std::vector<std::vector<double>> s2(checks.size()), s1(checks.size());
  for (std::uint32_t r = 0; r < replicates; ++r) {
    const LimitPath p2 = simulate_limit_path(two, dt, T, stream_seed(seed, 2 * r));
    const LimitPath p1 =
        simulate_limit_path(one, kappa * dt, kappa * T, stream_seed(seed, 2 * r + 1));
    for (std::size_t c = 0; c < checks.size(); ++c) {
      s2[c].push_back(p2.S[checks[c]]);
      s1[c].push_back(kappa * p1.S[checks[c]]);
    }
  }
  for (std::size_t c = 0; c < checks.size(); ++c) {
    const RunningStats a = summarize(s2[c]);
    const RunningStats b = summarize(s1[c]);
    rep.max_mean_gap = std::max(rep.max_mean_gap, std::abs(a.mean - b.mean));
    rep.max_var_gap = std::max(rep.max_var_gap, std::abs(a.variance() - b.variance()));
    rep.max_ks = std::max(rep.max_ks, ks_distance(s2[c], s1[c]));
  }
  return rep;
}

}  // namespace rig
