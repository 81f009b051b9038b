#include "rig/regimes.hpp"

#include <cmath>
#include <stdexcept>

namespace rig {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::Light: return "light";
    case Regime::Moderate: return "moderate";
    case Regime::Heavy: return "heavy";
  }
  return "?";
}

std::optional<Regime> regime_from_name(const std::string& name) {
  if (name == "light") return Regime::Light;
  if (name == "moderate") return Regime::Moderate;
  if (name == "heavy") return Regime::Heavy;
  return std::nullopt;
}

namespace {

RegimeConfig finish(Regime regime, double lambda, double theta, std::uint32_t n, std::uint64_t m) {
  if (n < 2) throw std::invalid_argument("config: n must be >= 2");
  if (m < 1) throw std::invalid_argument("config: m must be >= 1");
  if (regime == Regime::Light && m <= n)
    throw std::invalid_argument("config: light regime needs m > n");
  if (regime == Regime::Heavy && m >= n)
    throw std::invalid_argument("config: heavy regime needs m < n");
  const double nd = static_cast<double>(n), md = static_cast<double>(m);
  const double window =
      regime == Regime::Heavy ? std::pow(md, -1.0 / 3.0) : std::pow(nd, -1.0 / 3.0);
  const double p = (1.0 + lambda * window) / std::sqrt(md * nd);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("config: p outside [0,1]");
  RegimeConfig cfg;
  cfg.regime = regime;
  cfg.lambda = lambda;
  cfg.theta = theta;
  cfg.n = n;
  cfg.m = m;
  cfg.p = p;
  return cfg;
}

}  // namespace

RegimeConfig build_config(Regime regime, double lambda, double theta, std::uint32_t n) {
  if (regime != Regime::Moderate)
    throw std::invalid_argument("config: theta-based construction is for the moderate regime");
  if (!(theta > 0.0)) throw std::invalid_argument("config: theta must be > 0");
  const auto m = static_cast<std::uint64_t>(std::llround(theta * static_cast<double>(n)));
  return finish(regime, lambda, theta, n, m);
}

RegimeConfig build_config_m(Regime regime, double lambda, std::uint64_t m, std::uint32_t n) {
  if (regime == Regime::Moderate)
    throw std::invalid_argument("config: moderate regime is built from theta");
  return finish(regime, lambda, 1.0, n, m);
}

RegimeConfig build_config_aspect(Regime regime, double lambda, double aspect, std::uint32_t n) {
  if (regime == Regime::Moderate)
    throw std::invalid_argument("config: moderate regime is built from theta");
  if (regime == Regime::Light && !(aspect > 1.0))
    throw std::invalid_argument("config: light regime needs aspect > 1");
  if (regime == Regime::Heavy && !(aspect > 0.0 && aspect < 1.0))
    throw std::invalid_argument("config: heavy regime needs aspect in (0,1)");
  const auto m =
      static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(n), aspect)));
  return finish(regime, lambda, 1.0, n, m);
}

ScalingSet scaling_set(const RegimeConfig& cfg) {
  const double nd = static_cast<double>(cfg.n), md = static_cast<double>(cfg.m);
  ScalingSet s{};
  if (cfg.regime == Regime::Heavy) {
    s.time_scale = std::pow(md, 2.0 / 3.0);
    s.walk_scale = std::pow(md, -1.0 / 3.0);
    s.distance_scale = std::pow(md, -1.0 / 3.0);
    s.mass_scale = std::pow(md, -1.0 / 6.0) / std::sqrt(nd);
    s.triangle_scale = std::pow(md, 5.0 / 6.0) * std::pow(nd, -1.5);
  } else {
    s.time_scale = std::pow(nd, 2.0 / 3.0);
    s.walk_scale = std::pow(nd, -1.0 / 3.0);
    s.distance_scale = std::pow(nd, -1.0 / 3.0);
    s.mass_scale = std::pow(nd, -2.0 / 3.0);
    s.triangle_scale = cfg.regime == Regime::Moderate
                           ? std::pow(nd, -2.0 / 3.0)
                           : std::sqrt(md) * std::pow(nd, -7.0 / 6.0);
  }
  return s;
}

double r_walk_scale(const RegimeConfig& cfg) {
  const double nd = static_cast<double>(cfg.n), md = static_cast<double>(cfg.m);
  switch (cfg.regime) {
    case Regime::Moderate: return std::pow(nd, -1.0 / 3.0);
    case Regime::Light: return std::pow(nd, -1.0 / 6.0) / std::sqrt(md);
    case Regime::Heavy: return std::pow(md, -1.0 / 6.0) / std::sqrt(nd);
  }
  return 0.0;
}

double expected_degree(const RegimeConfig& cfg) {
  // 1 - (1-p^2)^m computed as -expm1(m * log1p(-p^2)) to keep precision at
  // the critical scale where p^2 * m ~ 1/sqrt(mn) * ... is tiny.
  const double log_term = static_cast<double>(cfg.m) * std::log1p(-cfg.p * cfg.p);
  return (static_cast<double>(cfg.n) - 1.0) * (-std::expm1(log_term));
}

double clustering_limit(const RegimeConfig& cfg) {
  switch (cfg.regime) {
    case Regime::Light: return 0.0;
    case Regime::Heavy: return 1.0;
    case Regime::Moderate: return 1.0 / (1.0 + std::sqrt(cfg.theta));
  }
  return 0.0;
}

double c_theta(double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("c_theta: theta must be > 0");
  return 0.5 / std::sqrt(theta) + 1.0 / (6.0 * theta);
}

double kappa_theta(double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("kappa_theta: theta must be > 0");
  return std::cbrt(1.0 + 1.0 / std::sqrt(theta));
}

double lambda_theta(double lambda, double theta) {
  const double k = kappa_theta(theta);
  return lambda / (k * k);
}

}  // namespace rig
