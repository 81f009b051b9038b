#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "rig/regimes.hpp"
#include "rig/validation.hpp"

namespace rig {

enum class Target : std::uint8_t {
  WalkLaw,
  ComponentSizes,
  TriangleModerate,
  TriangleLight,
  TriangleHeavy,
  SurplusMeasure,
  ClusteringCoefficient,
  TriangleCritLight,
};

const char* target_name(Target t);
bool target_from_name(const std::string& name, Target& out);

struct ExperimentPlan {
  std::string name = "campaign";
  RegimeConfig config{};
  std::uint32_t replicates = 200;
  double horizon_t = 1.0;   // walk/triangle checkpoints live in (0, horizon_t]
  std::uint64_t seed = 1;
  std::vector<Target> targets;
  std::string output_dir = "results";
  double dt = 1e-3;             // grid step for simulated limit paths
  double continuum_T = 15.0;    // horizon for limit excursion statistics
  std::uint32_t continuum_paths = 500;
  std::map<std::string, double> tolerances;  // named overrides, see plan_tolerance
  std::uint32_t threads = 0;    // 0 = library default
};

// Named tolerance with a per-call fallback. Keys in use: "se_mult", "ks",
// "rel", "box_t", "box_l", "so_fraction_max", "component_level",
// "ranking_agreement_slack".
double plan_tolerance(const ExperimentPlan& plan, const std::string& key,
                      double fallback);

// Throws std::invalid_argument when the plan is inconsistent (bad replicate
// counts, a target that does not apply to the configured regime, horizons
// that overrun the explorable step range).
void validate_plan(const ExperimentPlan& plan);

struct TargetResult {
  Target target{};
  bool ok = true;      // false when the target itself threw
  std::string error;   // what() of the captured exception
  std::vector<StatReport> reports;
  // Raw per-replicate samples, written to CSV as "replicate,stat,value".
  std::vector<std::tuple<std::uint32_t, std::string, double>> samples;
  std::string csv_path;    // filled by run_campaign
  std::string jsonl_path;  // filled by run_campaign
  bool all_pass() const;
};

struct CampaignResult {
  std::string name;
  std::uint64_t seed = 0;
  double elapsed_ms = 0.0;
  std::vector<TargetResult> targets;
  bool all_pass() const;
};

TargetResult run_walk_law(const ExperimentPlan& plan);
TargetResult run_component_sizes(const ExperimentPlan& plan);
TargetResult run_triangles(const ExperimentPlan& plan, Target which);
TargetResult run_surplus(const ExperimentPlan& plan);
TargetResult run_clustering(const ExperimentPlan& plan);

// Runs every target in the plan, capturing per-target failures instead of
// aborting, and writes <output_dir>/<name>/<target>.{jsonl,csv}.
CampaignResult run_campaign(const ExperimentPlan& plan);

}  // namespace rig
