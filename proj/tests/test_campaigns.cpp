#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "rig/campaigns.hpp"
#include "rig/regimes.hpp"

using namespace rig;

namespace {

ExperimentPlan tiny_moderate_plan() {
  ExperimentPlan plan;
  plan.name = "tiny-moderate";
  plan.config = build_config(Regime::Moderate, 0.0, 1.0, 600);
  plan.replicates = 50;
  plan.horizon_t = 0.5;
  plan.seed = 41;
  plan.targets = {Target::WalkLaw, Target::ComponentSizes, Target::TriangleModerate,
                  Target::SurplusMeasure, Target::ClusteringCoefficient};
  plan.output_dir = "test_results";
  plan.dt = 0.01;
  plan.continuum_T = 15.0;
  plan.continuum_paths = 60;
  // Wide-open gates: this test exercises plumbing, not statistics. The sharp
  // tolerances run in the acceptance binary at realistic sizes.
  plan.tolerances = {{"se_mult", 12.0}, {"ks", 0.9},  {"rel", 2.0},
                     {"box_t", 0.4},    {"box_l", 1.0}, {"so_fraction_max", 1.0}};
  return plan;
}

const TargetResult& find_target(const CampaignResult& res, Target t) {
  for (const auto& tr : res.targets)
    if (tr.target == t) return tr;
  REQUIRE(false);
  return res.targets.front();
}

bool has_report(const TargetResult& tr, const std::string& name) {
  return std::any_of(tr.reports.begin(), tr.reports.end(),
                     [&](const StatReport& r) { return r.statistic == name; });
}

}  // namespace

TEST_CASE("target names round-trip") {
  const std::vector<Target> all = {
      Target::WalkLaw,          Target::ComponentSizes,
      Target::TriangleModerate, Target::TriangleLight,
      Target::TriangleHeavy,    Target::SurplusMeasure,
      Target::ClusteringCoefficient, Target::TriangleCritLight};
  for (Target t : all) {
    Target back{};
    REQUIRE(target_from_name(target_name(t), back));
    CHECK(back == t);
  }
  Target out{};
  CHECK(!target_from_name("walklaw", out));
  CHECK(!target_from_name("", out));
}

TEST_CASE("plan validation rejects inconsistent inputs") {
  auto ok = tiny_moderate_plan();
  CHECK_NOTHROW(validate_plan(ok));

  auto p = ok;
  p.name = "bad name";
  CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
  p = ok;
  p.name.clear();
  CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
  p = ok;
  p.replicates = 1;
  CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
  p = ok;
  p.horizon_t = 0.0;
  CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
  p = ok;
  p.dt = 2.0;  // above continuum_T / 10
  CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
  p = ok;
  p.continuum_paths = 1;
  CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
  p = ok;
  p.targets.clear();
  CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
  p = ok;
  p.targets = {Target::WalkLaw, Target::WalkLaw};
  CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
  p = ok;
  p.tolerances["bogus_knob"] = 1.0;
  CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);

  // Horizon beyond the explorable range: at n = 600 the time scale is about
  // 71, so horizon_t = 10 asks for step 711 > 600.
  p = ok;
  p.horizon_t = 10.0;
  CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);

  // Regime-target mismatches.
  p = ok;
  p.targets = {Target::TriangleLight};
  CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);
  p = ok;
  p.targets = {Target::TriangleHeavy};
  CHECK_THROWS_AS(validate_plan(p), std::invalid_argument);

  ExperimentPlan lp = ok;
  lp.config = build_config_m(Regime::Light, 0.0, 160000, 400);
  lp.targets = {Target::TriangleModerate};
  CHECK_THROWS_AS(validate_plan(lp), std::invalid_argument);
  lp.targets = {Target::TriangleCritLight};  // m far beyond n^{7/3}
  CHECK_THROWS_AS(validate_plan(lp), std::invalid_argument);

  ExperimentPlan hp = ok;
  hp.config = build_config_m(Regime::Heavy, 0.0, 200, 4000);
  hp.targets = {Target::SurplusMeasure};
  CHECK_THROWS_AS(validate_plan(hp), std::invalid_argument);
}

TEST_CASE("plan tolerance lookup falls back per key") {
  auto plan = tiny_moderate_plan();
  CHECK(plan_tolerance(plan, "ks", 0.15) == doctest::Approx(0.9));
  CHECK(plan_tolerance(plan, "component_level", 1.0) == doctest::Approx(1.0));
}

TEST_CASE("moderate campaign end to end: artifacts, reports, determinism") {
  auto plan = tiny_moderate_plan();
  auto res = run_campaign(plan);

  CHECK(res.name == "tiny-moderate");
  CHECK(res.seed == 41);
  CHECK(res.elapsed_ms > 0.0);
  REQUIRE(res.targets.size() == plan.targets.size());
  for (const auto& tr : res.targets) {
    CHECK(tr.ok);
    CHECK(tr.error.empty());
    CHECK(!tr.reports.empty());
  }

  const auto& walk = find_target(res, Target::WalkLaw);
  CHECK(has_report(walk, "walk_s_mean_t0.125"));
  CHECK(has_report(walk, "walk_s_var_t0.25"));
  CHECK(has_report(walk, "walk_r_mean_t0.5"));
  CHECK(has_report(walk, "walk_r_var_t0.5"));
  CHECK(has_report(walk, "walk_rs_cov_t0.5"));
  CHECK(has_report(walk, "walk_s_ks_t0.5"));
  CHECK(!walk.samples.empty());

  const auto& comp = find_target(res, Target::ComponentSizes);
  CHECK(has_report(comp, "zeta_ks_rank1"));

  const auto& tri = find_target(res, Target::TriangleModerate);
  CHECK(has_report(tri, "triangle_mean_t0.5"));
  CHECK(has_report(tri, "triangle_component_ks"));

  const auto& sur = find_target(res, Target::SurplusMeasure);
  CHECK(has_report(sur, "surplus_box_count"));
  CHECK(has_report(sur, "surplus_so_fraction"));

  const auto& clu = find_target(res, Target::ClusteringCoefficient);
  REQUIRE(has_report(clu, "clustering_coefficient"));
  CHECK(clu.reports[0].reference == doctest::Approx(0.5));

  // Every promised artifact exists and parses.
  namespace fs = std::filesystem;
  for (const auto& tr : res.targets) {
    REQUIRE(fs::exists(tr.jsonl_path));
    REQUIRE(fs::exists(tr.csv_path));
    std::ifstream jl(tr.jsonl_path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(jl, line)) {
      auto j = nlohmann::json::parse(line);
      CHECK(j.contains("statistic"));
      lines++;
    }
    CHECK(lines == tr.reports.size());
    std::ifstream cs(tr.csv_path);
    std::getline(cs, line);
    CHECK(line == "replicate,stat,value");
  }
  const fs::path summary = fs::path(plan.output_dir) / plan.name / "summary.json";
  REQUIRE(fs::exists(summary));
  std::ifstream sf(summary);
  auto sj = nlohmann::json::parse(sf);
  CHECK(sj["name"] == "tiny-moderate");
  CHECK(sj["targets"].size() == plan.targets.size());
  CHECK(sj.contains("all_pass"));

  // Bitwise determinism, including across thread counts.
  auto plan1 = plan;
  plan1.threads = 1;
  auto plan4 = plan;
  plan4.threads = 4;
  auto res1 = run_campaign(plan1);
  auto res4 = run_campaign(plan4);
  REQUIRE(res1.targets.size() == res4.targets.size());
  for (std::size_t i = 0; i < res1.targets.size(); ++i) {
    const auto& a = res1.targets[i];
    const auto& b = res4.targets[i];
    REQUIRE(a.reports.size() == b.reports.size());
    for (std::size_t j = 0; j < a.reports.size(); ++j) {
      CHECK(a.reports[j].statistic == b.reports[j].statistic);
      CHECK(a.reports[j].observed == b.reports[j].observed);
      CHECK(a.reports[j].reference == b.reports[j].reference);
    }
    CHECK(a.samples == b.samples);
  }
}

TEST_CASE("light and heavy campaigns run their regime-specific targets") {
  ExperimentPlan lp;
  lp.name = "tiny-light";
  lp.config = build_config_m(Regime::Light, 0.0, 160000, 400);
  lp.replicates = 30;
  lp.horizon_t = 0.5;
  lp.seed = 43;
  lp.targets = {Target::WalkLaw, Target::TriangleLight};
  lp.output_dir = "test_results";
  lp.continuum_paths = 40;
  lp.dt = 0.01;
  lp.tolerances = {{"se_mult", 12.0}, {"ks", 0.9}, {"rel", 2.0}};
  auto lres = run_campaign(lp);
  for (const auto& tr : lres.targets) {
    CHECK(tr.ok);
    CHECK(tr.error.empty());
  }
  const auto& lwalk = find_target(lres, Target::WalkLaw);
  CHECK(has_report(lwalk, "walk_r_mean_t0.25"));
  CHECK(!has_report(lwalk, "walk_r_var_t0.25"));  // covariance block is Moderate-only
  CHECK(has_report(find_target(lres, Target::TriangleLight), "triangle_mean_t0.5"));

  ExperimentPlan hp;
  hp.name = "tiny-heavy";
  hp.config = build_config_m(Regime::Heavy, 0.0, 200, 4000);
  hp.replicates = 30;
  hp.horizon_t = 1.0;
  hp.seed = 44;
  hp.targets = {Target::WalkLaw, Target::ComponentSizes, Target::TriangleHeavy};
  hp.output_dir = "test_results";
  hp.continuum_paths = 40;
  hp.dt = 0.01;
  hp.tolerances = {{"se_mult", 12.0}, {"ks", 0.9}, {"rel", 2.0},
                   {"ranking_agreement_slack", 1.0}};
  auto hres = run_campaign(hp);
  for (const auto& tr : hres.targets) {
    CHECK(tr.ok);
    CHECK(tr.error.empty());
  }
  CHECK(has_report(find_target(hres, Target::ComponentSizes), "heavy_ranking_agreement"));
  CHECK(has_report(find_target(hres, Target::TriangleHeavy), "triangle_mean_t1"));
}

TEST_CASE("near-critical light triangle comparison produces its gap report") {
  ExperimentPlan plan;
  plan.name = "tiny-crit-light";
  plan.config = build_config_m(Regime::Light, 0.0, 234000, 200);
  plan.replicates = 30;
  plan.horizon_t = 0.5;
  plan.seed = 45;
  plan.targets = {Target::TriangleCritLight};
  plan.output_dir = "test_results";
  plan.continuum_paths = 10;
  plan.tolerances = {{"se_mult", 12.0}};
  CHECK_NOTHROW(validate_plan(plan));
  auto res = run_campaign(plan);
  REQUIRE(res.targets.size() == 1);
  CHECK(res.targets[0].ok);
  REQUIRE(res.targets[0].reports.size() == 1);
  CHECK(res.targets[0].reports[0].statistic == "crit_light_mean_gap");
  CHECK(res.targets[0].reports[0].reference == doctest::Approx(0.0));
}

TEST_CASE("a target that throws is captured instead of aborting the campaign") {
  auto plan = tiny_moderate_plan();
  plan.name = "tiny-error";
  plan.replicates = 4;  // below the walk-law floor of 8, above the plan floor of 2
  plan.targets = {Target::WalkLaw, Target::ClusteringCoefficient};
  auto res = run_campaign(plan);
  REQUIRE(res.targets.size() == 2);
  const auto& bad = find_target(res, Target::WalkLaw);
  CHECK(!bad.ok);
  CHECK(!bad.error.empty());
  CHECK(!res.all_pass());
  const auto& good = find_target(res, Target::ClusteringCoefficient);
  CHECK(good.ok);

  // The jsonl artifact of the failed target records the error line.
  std::ifstream jl(bad.jsonl_path);
  std::string line;
  REQUIRE(std::getline(jl, line));
  auto j = nlohmann::json::parse(line);
  CHECK(j["ok"] == false);
  CHECK(j.contains("error"));
}

TEST_CASE("campaigns with invalid plans refuse to start") {
  auto plan = tiny_moderate_plan();
  plan.targets = {Target::TriangleHeavy};
  CHECK_THROWS_AS(run_campaign(plan), std::invalid_argument);
}
