#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace rig {

enum class Regime { Light, Moderate, Heavy };

std::string regime_name(Regime r);
std::optional<Regime> regime_from_name(const std::string& name);

// One point of the critical window. p sits at the phase transition up to a
// lambda-sized perturbation whose scale depends on the regime:
//   Light/Moderate: p = (1 + lambda * n^{-1/3}) / sqrt(mn)
//   Heavy:          p = (1 + lambda * m^{-1/3}) / sqrt(mn)
struct RegimeConfig {
  Regime regime = Regime::Moderate;
  double lambda = 0.0;
  double theta = 1.0;  // aspect limit m/n; meaningful for Moderate only
  std::uint32_t n = 0;
  std::uint64_t m = 0;
  double p = 0.0;
};

// All rescalings that turn discrete observables into limit coordinates.
// Campaigns must take every exponent from here.
struct ScalingSet {
  double time_scale;      // steps per unit of limit time: n^{2/3} or m^{2/3}
  double walk_scale;      // walk values: n^{-1/3} or m^{-1/3}
  double distance_scale;  // graph distances: n^{-1/3} or m^{-1/3}
  double mass_scale;      // component masses: n^{-2/3} or m^{-1/6} n^{-1/2}
  double triangle_scale;  // triangle counts: n^{-2/3}, m^{1/2} n^{-7/6}, m^{5/6} n^{-3/2}
};

// Moderate: m = round(theta * n), the canonical choice.
RegimeConfig build_config(Regime regime, double lambda, double theta, std::uint32_t n);
// Light/Heavy with explicit m.
RegimeConfig build_config_m(Regime regime, double lambda, std::uint64_t m, std::uint32_t n);
// Light/Heavy with m = round(n^aspect); aspect > 1 for Light, < 1 for Heavy.
RegimeConfig build_config_aspect(Regime regime, double lambda, double aspect, std::uint32_t n);

ScalingSet scaling_set(const RegimeConfig& cfg);

// Rescale factor for the community-count walk R (after centering by
// sqrt(theta)*k in the Moderate regime): n^{-1/3}, n^{-1/6} m^{-1/2}, or the
// role-swapped m^{-1/6} n^{-1/2}.
double r_walk_scale(const RegimeConfig& cfg);

// (n-1) * (1 - (1-p^2)^m), exact.
double expected_degree(const RegimeConfig& cfg);

// Limit of the clustering coefficient: 0 (Light), (1+sqrt(theta))^{-1} (Moderate), 1 (Heavy).
double clustering_limit(const RegimeConfig& cfg);

// Triangle-density constant of the moderate regime: 1/(2 sqrt(theta)) + 1/(6 theta).
double c_theta(double theta);

// (1 + theta^{-1/2})^{1/3} and the window remap lambda -> lambda * kappa^{-2}.
double kappa_theta(double theta);
double lambda_theta(double lambda, double theta);

}  // namespace rig
