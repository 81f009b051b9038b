#pragma once
// Continuum limit objects: drifted Gaussian walk pairs, their height
// transforms, ranked excursions, Poisson surplus atoms with shortcut pairs,
// and finite metric approximations of the glued limit graphs.

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace rig {

struct LimitParams {
  double lambda = 0.0;
  double theta = std::numeric_limits<double>::infinity();  // inf: single-noise walk
};

struct LimitPath {
  double dt = 0.0;
  double T = 0.0;
  LimitParams params;
  std::uint64_t seed = 0;
  bool drift_only = false;
  std::vector<double> S;
  std::vector<double> R;  // empty when theta is infinite
  std::vector<double> H;

  std::size_t points() const { return S.size(); }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
};

// Exact Gaussian increments sqrt(dt)*Z plus analytic drift; for finite theta
// the two coordinates share one of the two noise sources.
LimitPath simulate_limit_path(const LimitParams& params, double dt, double T,
                              std::uint64_t seed, bool drift_only = false);

// c * (S - running min) with c = 2 for theta = inf, 2/(1+theta^{-1/2}) else.
std::vector<double> height_of_path(const LimitPath& path);

struct Excursion {
  double g = 0.0, d = 0.0;  // grid times bracketing the positive stretch of H
  double zeta = 0.0;
  bool complete = true;
};

enum class HorizonPolicy { Drop, Truncate };

struct ExcursionList {
  std::vector<Excursion> ranked;  // longest first
  bool had_incomplete = false;
};

ExcursionList excursions(const LimitPath& path,
                         HorizonPolicy policy = HorizonPolicy::Drop);

// Unit-rate Poisson points under the reflected walk over one excursion,
// exact for the piecewise-linear interpolation. Returns (x, y) with absolute x.
std::vector<std::pair<double, double>> sample_poisson_surplus(const LimitPath& path,
                                                              const Excursion& exc,
                                                              std::uint64_t seed);

struct ShortcutSet {
  std::vector<std::pair<double, double>> pairs;  // (s, t) excursion-local grid times
};

// Each atom (x, y) pairs the time t = x - g with the last grid time before it
// at which the reflected walk was at or below its value at x minus y.
ShortcutSet shortcuts_from_atoms(const LimitPath& path, const Excursion& exc,
                                 const std::vector<std::pair<double, double>>& atoms);

class RangeMin {
 public:
  RangeMin() = default;
  explicit RangeMin(const std::vector<double>& v);
  double min(std::size_t i, std::size_t j) const;  // inclusive indices

 private:
  std::vector<std::vector<double>> table_;
};

struct MetricGraphSpec {
  std::vector<double> h;  // excursion heights on a uniform grid of [0, zeta]
  double resolution = 0.0;
  ShortcutSet pi;
  RangeMin rmq;

  double zeta() const { return static_cast<double>(h.size() - 1) * resolution; }
};

MetricGraphSpec make_metric_spec(const LimitPath& path, const Excursion& exc,
                                 const ShortcutSet& pi);

// h(a)+h(b) minus twice the minimum of h between them.
double tree_distance(const MetricGraphSpec& spec, double a, double b);

// Shortest length over paths allowed to jump along glued shortcut pairs;
// never exceeds tree_distance.
double graph_distance(const MetricGraphSpec& spec, double a, double b);

// 6(q+1)(sup|h1-h2| + modulus of h1 at the pair-matching slack) + |z1-z2|;
// infinity when the shortcut counts differ.
double ghp_upper_bound(const MetricGraphSpec& a, const MetricGraphSpec& b,
                       double delta);

struct KappaCheckReport {
  double max_mean_gap = 0.0;
  double max_var_gap = 0.0;
  double max_ks = 0.0;
  double drift_gap = 0.0;  // drift-only paths compared pointwise
};

// Distributional check of the time-space rescaling that maps the two-noise
// walk onto the single-noise one.
KappaCheckReport kappa_scaling_check(double lambda, double theta, double dt,
                                     double T, std::uint32_t replicates,
                                     std::uint64_t seed);

}  // namespace rig
