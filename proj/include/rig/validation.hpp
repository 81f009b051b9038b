#pragma once
// Statistical bridge between the discrete exploration and its limits:
// Poisson surrogate walks, the i.i.d. reference walk with its change-of-
// measure derivative, Binomial/Poisson moment oracles, and report plumbing.

#include <cstdint>
#include <string>
#include <vector>

#include "rig/regimes.hpp"

namespace rig {

enum class SurrogateKind { PoissonCheck, IidHat };

struct SurrogateWalk {
  SurrogateKind kind = SurrogateKind::PoissonCheck;
  RegimeConfig cfg;
  double lambda_star = 0.0;  // IidHat only
  double alpha = 0.0, beta = 0.0;
  std::vector<std::uint32_t> X;
  std::vector<std::uint64_t> R;
  std::vector<std::int64_t> S;
  std::vector<std::uint32_t> H;
};

double default_lambda_star(double lambda);  // max(lambda, 0) + 1

// Reference rates of the i.i.d. walk; positive for large enough n.
double alpha_n(const RegimeConfig& cfg, double lambda_star);
double beta_n(const RegimeConfig& cfg, double lambda_star);

SurrogateWalk sample_surrogate(SurrogateKind kind, const RegimeConfig& cfg,
                               double lambda_star, std::uint32_t steps,
                               std::uint64_t seed);

// Change-of-measure derivative of the first N steps of an IidHat walk
// against the state-dependent rates; exact zero on zero-rate positive jumps.
double rn_derivative(const SurrogateWalk& hat_walk, std::uint32_t N);

double factorial_moment_binomial(double N, double p, std::uint32_t k);
double factorial_moment_poisson(double c, std::uint32_t k);
double stirling2(std::uint32_t k, std::uint32_t j);
double raw_moment_poisson(double c, std::uint32_t k);

// Np^2 + (Np)^k / k!, a ceiling for P(Binomial(N,p) >= k).
double binom_tail_bound(double N, double p, std::uint32_t k);

// Exact total-variation distance Binomial(N,p) vs Poisson(Np) by summation.
double tv_binom_poisson(std::uint64_t N, double p);

struct StatReport {
  std::string statistic;
  double observed = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::uint64_t replicates = 0;
  double se = 0.0;
};

StatReport value_report(std::string name, double observed, double reference,
                        double tolerance, std::uint64_t replicates, double se);
// Tolerance = se_mult standard errors of the sample mean / variance.
StatReport mean_report(std::string name, const std::vector<double>& xs,
                       double reference, double se_mult);
StatReport variance_report(std::string name, const std::vector<double>& xs,
                           double reference, double se_mult);
std::string json_line(const StatReport& r);

// Binned total-variation estimate (a lower bound on the true TV) between the
// exploration walk and its PoissonCheck surrogate at several checkpoints.
StatReport surrogate_tv_check(const RegimeConfig& cfg, std::uint32_t steps,
                              std::uint32_t replicates, std::uint64_t seed,
                              double tolerance);

}  // namespace rig
