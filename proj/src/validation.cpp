#include "rig/validation.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rig/exploration.hpp"
#include "rig/rng.hpp"
#include "rig/sampler.hpp"
#include "rig/stats.hpp"

namespace rig {

double default_lambda_star(double lambda) { return std::max(lambda, 0.0) + 1.0; }

double alpha_n(const RegimeConfig& cfg, double lambda_star) {
  const double mp = static_cast<double>(cfg.m) * cfg.p;
  if (cfg.regime == Regime::Moderate)
    return mp - std::sqrt(cfg.theta) * lambda_star *
                    std::pow(static_cast<double>(cfg.n), -1.0 / 3.0);
  if (cfg.regime == Regime::Light) return mp;
  throw std::invalid_argument("alpha_n: reference walk needs Moderate or Light");
}

double beta_n(const RegimeConfig& cfg, double lambda_star) {
  const double np = static_cast<double>(cfg.n) * cfg.p;
  if (cfg.regime == Regime::Moderate)
    return np - lambda_star / std::sqrt(cfg.theta) *
                    std::pow(static_cast<double>(cfg.n), -1.0 / 3.0);
  if (cfg.regime == Regime::Light)
    return np - 2.0 * lambda_star * std::pow(static_cast<double>(cfg.m), -0.5) *
                    std::pow(static_cast<double>(cfg.n), 1.0 / 6.0);
  throw std::invalid_argument("beta_n: reference walk needs Moderate or Light");
}

SurrogateWalk sample_surrogate(SurrogateKind kind, const RegimeConfig& cfg,
                               double lambda_star, std::uint32_t steps,
                               std::uint64_t seed) {
  if (cfg.regime == Regime::Heavy)
    throw std::invalid_argument("sample_surrogate: Moderate or Light only");
  SurrogateWalk w;
  w.kind = kind;
  w.cfg = cfg;
  w.lambda_star = lambda_star;
  w.X.reserve(steps);
  w.R.reserve(steps);
  w.S.reserve(steps);

  Rng rng(seed);
  if (kind == SurrogateKind::IidHat) {
    if (lambda_star <= std::max(cfg.lambda, 0.0))
      throw std::invalid_argument("sample_surrogate: lambda_star too small");
    w.alpha = alpha_n(cfg, lambda_star);
    w.beta = beta_n(cfg, lambda_star);
    if (w.alpha <= 0.0 || w.beta <= 0.0)
      throw std::invalid_argument("sample_surrogate: rates not positive at this n");
    std::uint64_t r = 0;
    std::int64_t s = 0;
    for (std::uint32_t k = 1; k <= steps; ++k) {
      const std::uint64_t dr = rng.poisson(w.alpha);
      const std::uint64_t ds1 = rng.poisson(static_cast<double>(dr) * w.beta);
      r += dr;
      s += static_cast<std::int64_t>(ds1) - 1;
      w.X.push_back(static_cast<std::uint32_t>(dr));
      w.R.push_back(r);
      w.S.push_back(s);
    }
  } else {
    double u = static_cast<double>(cfg.m);
    double v = static_cast<double>(cfg.n) - 1.0;
    std::uint64_t r = 0;
    std::int64_t s = 0, s_min = 0;
    for (std::uint32_t k = 1; k <= steps; ++k) {
      const std::uint64_t dr = rng.poisson(u * cfg.p);
      const std::uint64_t ds1 = rng.poisson(static_cast<double>(dr) * v * cfg.p);
      r += dr;
      s += static_cast<std::int64_t>(ds1) - 1;
      s_min = std::min(s_min, s);
      w.X.push_back(static_cast<std::uint32_t>(dr));
      w.R.push_back(r);
      w.S.push_back(s);
      u = r < cfg.m ? static_cast<double>(cfg.m - r) : 0.0;
      const std::int64_t vs = static_cast<std::int64_t>(cfg.n) - k - 1 - (s - s_min);
      v = vs > 0 ? static_cast<double>(vs) : 0.0;
    }
  }
  w.H = height_from_walk(w.S);

  // Self-audit: the stored sequences satisfy the recursions they came from.
  std::uint64_t r_chk = 0;
  for (std::uint32_t k = 0; k < steps; ++k) {
    r_chk += w.X[k];
    assert(w.R[k] == r_chk);
    assert(w.S[k] - (k > 0 ? w.S[k - 1] : 0) >= -1);
  }
  assert(w.H.size() == steps);
  return w;
}

double rn_derivative(const SurrogateWalk& w, std::uint32_t N) {
  if (w.kind != SurrogateKind::IidHat)
    throw std::invalid_argument("rn_derivative: needs an IidHat walk");
  if (N > w.S.size()) throw std::invalid_argument("rn_derivative: walk too short");
  const double la = std::log(w.alpha), lb = std::log(w.beta);
  CompensatedSum acc;
  std::int64_t s_min = 0;  // min over steps before k
  for (std::uint32_t k = 1; k <= N; ++k) {
    const std::uint64_t r_prev = k >= 2 ? w.R[k - 2] : 0;
    const std::int64_t s_prev = k >= 2 ? w.S[k - 2] : 0;
    const double u = r_prev < w.cfg.m ? static_cast<double>(w.cfg.m - r_prev) : 0.0;
    const std::int64_t vs =
        static_cast<std::int64_t>(w.cfg.n) - k - (s_prev - s_min);
    const double v = vs > 0 ? static_cast<double>(vs) : 0.0;
    const double up = u * w.cfg.p, vp = v * w.cfg.p;
    const auto dr = static_cast<double>(w.X[k - 1]);
    const auto ds1 = static_cast<double>(w.S[k - 1] - s_prev + 1);
    if (dr > 0) {
      if (up <= 0.0) return 0.0;
      acc.add(dr * (std::log(up) - la));
    }
    acc.add(w.alpha - up);
    if (ds1 > 0) {
      if (vp <= 0.0) return 0.0;
      acc.add(ds1 * (std::log(vp) - lb));
    }
    acc.add(dr * (w.beta - vp));
    s_min = std::min(s_min, w.S[k - 1]);
  }
  return std::exp(acc.sum);
}

double factorial_moment_binomial(double N, double p, std::uint32_t k) {
  double out = 1.0;
  for (std::uint32_t i = 0; i < k; ++i) out *= (N - i) * p;
  return out;
}

double factorial_moment_poisson(double c, std::uint32_t k) {
  return std::pow(c, static_cast<double>(k));
}

double stirling2(std::uint32_t k, std::uint32_t j) {
  if (j > k) return 0.0;
  if (k == 0) return j == 0 ? 1.0 : 0.0;
  if (j == 0) return 0.0;
  std::vector<double> row(k + 1, 0.0), prev(k + 1, 0.0);
  prev[0] = 1.0;  // row for k = 0
  for (std::uint32_t kk = 1; kk <= k; ++kk) {
    row[0] = 0.0;
    for (std::uint32_t jj = 1; jj <= kk; ++jj)
      row[jj] = static_cast<double>(jj) * prev[jj] + prev[jj - 1];
    std::swap(row, prev);
  }
  return prev[j];
}

double raw_moment_poisson(double c, std::uint32_t k) {
  double out = 0.0;
  for (std::uint32_t j = 1; j <= k; ++j) out += stirling2(k, j) * std::pow(c, j);
  return k == 0 ? 1.0 : out;
}

double binom_tail_bound(double N, double p, std::uint32_t k) {
  double fact = 1.0;
  for (std::uint32_t i = 2; i <= k; ++i) fact *= i;
  return N * p * p + std::pow(N * p, static_cast<double>(k)) / fact;
}

double tv_binom_poisson(std::uint64_t N, double p) {
  const double lam = static_cast<double>(N) * p;
  const double lq = std::log1p(-p), lp = std::log(p);
  const double lgn = std::lgamma(static_cast<double>(N) + 1.0);
  double acc = 0.0, mass_b = 0.0, mass_p = 0.0;
  for (std::uint64_t k = 0;; ++k) {
    double pb = 0.0;
    if (k <= N) {
      const double lk = static_cast<double>(k);
      pb = std::exp(lgn - std::lgamma(lk + 1.0) -
                    std::lgamma(static_cast<double>(N - k) + 1.0) + lk * lp +
                    static_cast<double>(N - k) * lq);
    }
    const double pp = std::exp(static_cast<double>(k) * std::log(lam) - lam -
                               std::lgamma(static_cast<double>(k) + 1.0));
    acc += std::abs(pb - pp);
    mass_b += pb;
    mass_p += pp;
    // Past the mode both pmfs decay monotonically, so once they underflow the
    // remaining contribution is below any tolerance; the rounded masses alone
    // are not a safe exit test because they can stall short of 1.
    if (static_cast<double>(k) > lam) {
      if (1.0 - mass_b < 1e-14 && 1.0 - mass_p < 1e-14) break;
      if (pb < 1e-18 && pp < 1e-18) break;
    }
  }
  return acc / 2.0;
}

StatReport value_report(std::string name, double observed, double reference,
                        double tolerance, std::uint64_t replicates, double se) {
  StatReport r;
  r.statistic = std::move(name);
  r.observed = observed;
  r.reference = reference;
  r.tolerance = tolerance;
  r.replicates = replicates;
  r.se = se;
  r.pass = std::abs(observed - reference) <= tolerance;
  return r;
}

StatReport mean_report(std::string name, const std::vector<double>& xs,
                       double reference, double se_mult) {
  const RunningStats s = summarize(xs);
  return value_report(std::move(name), s.mean, reference,
                      se_mult * s.stderr_mean(), xs.size(), s.stderr_mean());
}

StatReport variance_report(std::string name, const std::vector<double>& xs,
                           double reference, double se_mult) {
  const RunningStats s = summarize(xs);
  return value_report(std::move(name), s.variance(), reference,
                      se_mult * s.stderr_variance(), xs.size(),
                      s.stderr_variance());
}

std::string json_line(const StatReport& r) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(12);
  os << "{\"statistic\":\"" << r.statistic << "\",\"observed\":" << r.observed
     << ",\"reference\":" << r.reference << ",\"tolerance\":" << r.tolerance
     << ",\"pass\":" << (r.pass ? "true" : "false")
     << ",\"replicates\":" << r.replicates << ",\"se\":" << r.se << "}";
  return os.str();
}

StatReport surrogate_tv_check(const RegimeConfig& cfg, std::uint32_t steps,
                              std::uint32_t replicates, std::uint64_t seed,
                              double tolerance) {
  if (steps == 0 || steps > cfg.n)
    throw std::invalid_argument("surrogate_tv_check: bad step count");
  std::vector<std::uint32_t> checks{steps / 4, steps / 2, 3 * steps / 4, steps};
  checks.erase(std::remove(checks.begin(), checks.end(), 0u), checks.end());
  checks.erase(std::unique(checks.begin(), checks.end()), checks.end());

  // Per checkpoint: histograms of X, dS, S; first = exploration, second = surrogate.
  std::vector<std::array<std::map<std::int64_t, std::pair<std::uint32_t, std::uint32_t>>, 3>>
      hists(checks.size());
  auto record = [&](std::size_t c, std::size_t which, std::int64_t x, std::int64_t ds,
                    std::int64_t s) {
    const std::int64_t vals[3] = {x, ds, s};
    for (std::size_t i = 0; i < 3; ++i) {
      auto& cell = hists[c][i][vals[i]];
      if (which == 0)
        ++cell.first;
      else
        ++cell.second;
    }
  };

  for (std::uint32_t r = 0; r < replicates; ++r) {
    const BipartiteGraph b = sample_bipartite(cfg, stream_seed(seed, 3 * r));
    const ExplorationTrace tr =
        explore(b, {RootRule::Mode::UniformRandom, stream_seed(seed, 3 * r + 1)});
    const SurrogateWalk sw = sample_surrogate(SurrogateKind::PoissonCheck, cfg, 0.0,
                                              steps, stream_seed(seed, 3 * r + 2));
    for (std::size_t c = 0; c < checks.size(); ++c) {
      const std::uint32_t k = checks[c];
      record(c, 0, tr.X[k - 1], tr.S[k - 1] - (k >= 2 ? tr.S[k - 2] : 0), tr.S[k - 1]);
      record(c, 1, sw.X[k - 1], sw.S[k - 1] - (k >= 2 ? sw.S[k - 2] : 0), sw.S[k - 1]);
    }
  }

  double worst = 0.0;
  for (const auto& per_check : hists)
    for (const auto& hist : per_check) {
      double tv = 0.0;
      for (const auto& [val, cnt] : hist)
        tv += std::abs(static_cast<double>(cnt.first) - static_cast<double>(cnt.second));
      worst = std::max(worst, tv / (2.0 * static_cast<double>(replicates)));
    }
  return value_report("surrogate_binned_tv", worst, 0.0, tolerance, replicates,
                      std::sqrt(0.25 / static_cast<double>(replicates)));
}

}  // namespace rig
