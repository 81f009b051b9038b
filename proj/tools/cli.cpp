#include "rig/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rig/campaigns.hpp"
#include "rig/continuum.hpp"
#include "rig/exploration.hpp"
#include "rig/regimes.hpp"
#include "rig/rng.hpp"
#include "rig/sampler.hpp"
#include "rig/surplus_triangles.hpp"

namespace rig {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ConfigFlags {
  std::string regime;
  double lambda = 0.0;
  double theta = 1.0;
  double aspect = 0.0;
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  std::uint64_t seed = 1;
  bool has_theta = false, has_aspect = false, has_m = false;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--regime", f.regime, "light | moderate | heavy")->required();
  cmd->add_option("--lambda", f.lambda, "window location");
  cmd->add_option("--theta", f.theta, "community/individual ratio (moderate)");
  cmd->add_option("--aspect", f.aspect, "set m = round(n^aspect)");
  cmd->add_option("--m", f.m, "community count");
  cmd->add_option("--n", f.n, "individual count")->required();
  cmd->add_option("--seed", f.seed, "RNG seed");
}

void finish_config_flags(const CLI::App* cmd, ConfigFlags& f) {
  f.has_theta = cmd->count("--theta") > 0;
  f.has_aspect = cmd->count("--aspect") > 0;
  f.has_m = cmd->count("--m") > 0;
}

RegimeConfig config_from_flags(const ConfigFlags& f) {
  const auto reg_opt = regime_from_name(f.regime);
  if (!reg_opt)
    throw std::invalid_argument("unknown regime '" + f.regime + "'");
  const Regime reg = *reg_opt;
  if (f.has_m && f.has_aspect)
    throw std::invalid_argument("give at most one of --m and --aspect");
  if (f.n > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("--n out of range");
  const auto n32 = static_cast<std::uint32_t>(f.n);
  if (reg == Regime::Moderate) {
    if (f.has_aspect || f.has_m)
      throw std::invalid_argument("moderate is parameterised by --theta");
    return build_config(reg, f.lambda, f.theta, n32);
  }
  if (f.has_theta)
    throw std::invalid_argument("--theta applies to moderate only");
  if (f.has_m) return build_config_m(reg, f.lambda, f.m, n32);
  if (f.has_aspect) return build_config_aspect(reg, f.lambda, f.aspect, n32);
  throw std::invalid_argument("light/heavy need --m or --aspect");
}

std::ostream& num(std::ostream& os) { return os << std::setprecision(10); }

// ---- sample ----------------------------------------------------------------

int cmd_sample(const ConfigFlags& flags, const std::string& dump_path) {
  const RegimeConfig cfg = config_from_flags(flags);
  const BipartiteGraph raw = sample_bipartite(cfg, stream_seed(flags.seed, 0));
  if (!dump_path.empty()) {
    std::ofstream out(dump_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + dump_path);
    dump_graph(raw, out);
  }
  // The Heavy walk runs on the community side, matching the campaign module.
  const bool swap = cfg.regime == Regime::Heavy;
  const BipartiteGraph* g = &raw;
  BipartiteGraph swapped;
  if (swap) {
    swapped = transpose(raw);
    g = &swapped;
  }
  RootRule rule;
  rule.mode = RootRule::Mode::UniformRandom;
  rule.seed = stream_seed(flags.seed, 1);
  const ExplorationTrace trace = explore(*g, rule);
  const auto comps = components(trace);
  const ScalingSet sc = scaling_set(cfg);
  double zeta1 = 0.0;
  std::uint64_t top = 0;
  for (const auto& c : comps) {
    const std::uint64_t mass = swap ? c.u_size : static_cast<std::uint64_t>(c.v_size);
    top = std::max(top, mass);
  }
  zeta1 = static_cast<double>(top) * sc.mass_scale;
  std::cout << num << "regime=" << regime_name(cfg.regime) << " n=" << cfg.n
            << " m=" << cfg.m << " p=" << cfg.p << " edges=" << raw.edge_count()
            << " isolated_u=" << raw.isolated_u_count()
            << " components=" << comps.size() << " zeta1=" << zeta1
            << " expected_degree=" << expected_degree(cfg) << "\n";
  return 0;
}

// ---- explore ---------------------------------------------------------------

std::uint64_t audit_trace(const BipartiteGraph& b, const ExplorationTrace& t,
                          std::uint64_t* out_checks) {
  std::uint64_t violations = 0, checks = 0;
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++violations;
  };
  const std::uint32_t n = t.n;
  std::int64_t rmin = 0;
  std::vector<std::uint32_t> closures;
  for (std::uint32_t k = 1; k <= n; ++k) {
    const bool closed = t.S[k - 1] < rmin;  // strict new minimum
    if (closed) closures.push_back(k);
    rmin = std::min(rmin, t.S[k - 1]);
    const std::int64_t a_k = t.S[k - 1] - rmin;
    expect(a_k >= 0);
    // the active list keeps the next vertex on top, so it runs one longer
    // than the reflected walk except right after a closure
    expect(static_cast<std::int64_t>(t.active_after[k - 1]) ==
           (closed ? 0 : a_k + 1));
    // one individual leaves the pool per step, actives are disjoint from it
    expect(static_cast<std::int64_t>(n) - static_cast<std::int64_t>(k) - a_k >= 0);
    expect(t.R[k - 1] <= b.m);
    if (k >= 2) expect(t.R[k - 1] >= t.R[k - 2]);
    std::uint64_t kids = 0;
    for (const auto& v : t.step_visits(k)) kids += v.child_count;
    const std::int64_t ds = k == 1 ? t.S[0] : t.S[k - 1] - t.S[k - 2];
    expect(static_cast<std::int64_t>(kids) == ds + 1);
  }
  const auto h = height_from_walk(t.S);
  expect(h.size() == t.H.size());
  for (std::size_t i = 0; i < h.size() && i < t.H.size(); ++i)
    expect(h[i] == t.H[i]);
  expect(!t.comp_bounds.empty() && t.comp_bounds.back() == n);
  expect(closures == t.comp_bounds);
  expect(t.S[n - 1] == -static_cast<std::int64_t>(t.comp_bounds.size()));
  expect(t.isolated_u == b.m - t.R[n - 1]);
  *out_checks = checks;
  return violations;
}

int cmd_explore(const ConfigFlags& flags, const std::string& load_path,
                const std::string& trace_csv, const std::string& root_rule) {
  BipartiteGraph b;
  if (!load_path.empty()) {
    std::ifstream in(load_path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read " + load_path);
    b = load_graph(in);
  } else {
    b = sample_bipartite(config_from_flags(flags), stream_seed(flags.seed, 0));
  }
  RootRule rule;
  if (root_rule == "uniform") {
    rule.mode = RootRule::Mode::UniformRandom;
  } else if (root_rule == "smallest") {
    rule.mode = RootRule::Mode::SmallestLabel;
  } else {
    throw std::invalid_argument("--root-rule must be uniform or smallest");
  }
  rule.seed = stream_seed(flags.seed, 1);
  const ExplorationTrace t = explore(b, rule);

  if (!trace_csv.empty()) {
    std::ofstream out(trace_csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + trace_csv);
    out << "k,X,dS,S,H,comp\n";
    std::size_t comp = 0;
    for (std::uint32_t k = 1; k <= t.n; ++k) {
      if (k > t.comp_bounds[comp]) ++comp;
      const std::int64_t ds = k == 1 ? t.S[0] : t.S[k - 1] - t.S[k - 2];
      out << k << ',' << t.X[k - 1] << ',' << ds << ',' << t.S[k - 1] << ','
          << t.H[k - 1] << ',' << comp + 1 << "\n";
    }
  }

  std::uint64_t checks = 0;
  const std::uint64_t violations = audit_trace(b, t, &checks);
  std::cout << "audit: steps=" << t.n << " communities=" << t.R[t.n - 1]
            << " components=" << t.comp_bounds.size()
            << " isolated_u=" << t.isolated_u << " checks=" << checks
            << " violations=" << violations << "\n";
  return violations == 0 ? 0 : 1;
}

// ---- campaign --------------------------------------------------------------

Target parse_target(const std::string& s) {
  Target t;
  if (!target_from_name(s, t))
    throw std::invalid_argument("plan: unknown target '" + s + "'");
  return t;
}

double as_number(const json& v, const char* key) {
  if (!v.is_number())
    throw std::invalid_argument(std::string("plan: '") + key +
                                "' must be a number");
  return v.get<double>();
}

std::uint64_t as_uint(const json& v, const char* key) {
  if (!v.is_number_unsigned())
    throw std::invalid_argument(std::string("plan: '") + key +
                                "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

ExperimentPlan plan_from_json(const json& j, const std::string& default_name) {
  if (!j.is_object()) throw std::invalid_argument("plan: not a JSON object");
  static const char* known[] = {"regime",     "lambda",    "theta",
                                "aspect",     "m",         "n",
                                "replicates", "horizon_t", "seed",
                                "targets",    "output_dir", "dt",
                                "tolerances"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known))
      throw std::invalid_argument("plan: unknown key '" + key + "'");
  }

  ConfigFlags f;
  if (!j.contains("regime") || !j.at("regime").is_string())
    throw std::invalid_argument("plan: 'regime' (string) is required");
  f.regime = j.at("regime").get<std::string>();
  if (j.contains("lambda")) f.lambda = as_number(j.at("lambda"), "lambda");
  if (j.contains("theta")) {
    f.theta = as_number(j.at("theta"), "theta");
    f.has_theta = true;
  }
  if (j.contains("aspect")) {
    f.aspect = as_number(j.at("aspect"), "aspect");
    f.has_aspect = true;
  }
  if (j.contains("m")) {
    f.m = as_uint(j.at("m"), "m");
    f.has_m = true;
  }
  if (!j.contains("n")) throw std::invalid_argument("plan: 'n' is required");
  f.n = as_uint(j.at("n"), "n");

  ExperimentPlan plan;
  plan.name = default_name;
  plan.config = config_from_flags(f);
  if (j.contains("replicates")) {
    const auto v = as_uint(j.at("replicates"), "replicates");
    if (v > std::numeric_limits<std::uint32_t>::max())
      throw std::invalid_argument("plan: 'replicates' out of range");
    plan.replicates = static_cast<std::uint32_t>(v);
  }
  if (j.contains("horizon_t"))
    plan.horizon_t = as_number(j.at("horizon_t"), "horizon_t");
  if (j.contains("seed")) plan.seed = as_uint(j.at("seed"), "seed");
  if (j.contains("dt")) plan.dt = as_number(j.at("dt"), "dt");
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string())
      throw std::invalid_argument("plan: 'output_dir' must be a string");
    plan.output_dir = j.at("output_dir").get<std::string>();
  }
  if (!j.contains("targets") || !j.at("targets").is_array())
    throw std::invalid_argument("plan: 'targets' (array) is required");
  for (const auto& t : j.at("targets")) {
    if (!t.is_string())
      throw std::invalid_argument("plan: targets must be strings");
    plan.targets.push_back(parse_target(t.get<std::string>()));
  }
  if (j.contains("tolerances")) {
    const auto& tj = j.at("tolerances");
    if (!tj.is_object())
      throw std::invalid_argument("plan: 'tolerances' must be an object");
    for (const auto& [key, value] : tj.items())
      plan.tolerances[key] = as_number(value, key.c_str());
  }
  return plan;
}

std::string sanitize_name(std::string stem) {
  for (char& c : stem) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) c = '-';
  }
  return stem.empty() ? std::string("campaign") : stem;
}

std::uint32_t threads_from_env(std::uint32_t fallback) {
  const char* env = std::getenv("RIG_THREADS");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (end == env || *end != '\0')
    throw std::invalid_argument("RIG_THREADS must be an unsigned integer");
  return static_cast<std::uint32_t>(v);
}

int cmd_campaign(const std::string& plan_path, std::uint32_t threads,
                 std::uint32_t continuum_paths, double continuum_T) {
  std::ifstream in(plan_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read plan " << plan_path << "\n";
    return 2;
  }
  ExperimentPlan plan;
  try {
    const json j = json::parse(in);
    plan = plan_from_json(j, sanitize_name(fs::path(plan_path).stem().string()));
  } catch (const json::exception& e) {
    std::cerr << "error: plan parse: " << e.what() << "\n";
    return 2;
  }
  plan.threads = threads_from_env(threads);
  if (continuum_paths > 0) plan.continuum_paths = continuum_paths;
  if (continuum_T > 0.0) plan.continuum_T = continuum_T;
  validate_plan(plan);  // invalid_argument maps to exit 2 in run_cli

  const CampaignResult result = run_campaign(plan);
  std::cout << "campaign " << result.name << " seed=" << result.seed << "\n";
  for (const auto& tr : result.targets) {
    std::size_t passed = 0;
    for (const auto& r : tr.reports) passed += r.pass ? 1 : 0;
    std::cout << "  " << std::left << std::setw(24) << target_name(tr.target)
              << (tr.all_pass() ? "PASS" : "FAIL") << "  " << passed << "/"
              << tr.reports.size() << " checks";
    if (!tr.ok) std::cout << "  error: " << tr.error;
    std::cout << "\n";
  }
  std::cout << (result.all_pass() ? "RESULT: PASS" : "RESULT: FAIL")
            << " elapsed_ms=" << num << result.elapsed_ms << "\n";
  return result.all_pass() ? 0 : 3;
}

// ---- limits ----------------------------------------------------------------

MetricGraphSpec subsample_spec(const MetricGraphSpec& fine,
                               std::size_t factor) {
  MetricGraphSpec coarse;
  coarse.resolution = fine.resolution * static_cast<double>(factor);
  for (std::size_t i = 0; i < fine.h.size(); i += factor)
    coarse.h.push_back(fine.h[i]);
  coarse.pi = fine.pi;
  coarse.rmq = RangeMin(coarse.h);
  return coarse;
}

int cmd_limits(double theta, bool use_inf, bool has_theta, double lambda,
               double T, double dt, std::uint64_t seed, const std::string& out,
               bool ghp_refine, bool kappa_check, bool drift_only) {
  if (use_inf == has_theta)
    throw std::invalid_argument("give exactly one of --theta and --inf");
  LimitParams params;
  params.lambda = lambda;
  params.theta = use_inf ? std::numeric_limits<double>::infinity() : theta;
  const LimitPath path = simulate_limit_path(params, dt, T, seed, drift_only);

  fs::create_directories(out);
  {
    std::ofstream f(fs::path(out) / "path.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write path.csv");
    f << std::setprecision(12) << "i,t,S,R,H\n";
    for (std::size_t i = 0; i < path.points(); ++i) {
      f << i << ',' << path.time(i) << ',' << path.S[i] << ',';
      if (i < path.R.size()) f << path.R[i];
      f << ',' << path.H[i] << "\n";
    }
  }
  const ExcursionList exc = excursions(path);
  {
    std::ofstream f(fs::path(out) / "excursions.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write excursions.csv");
    f << std::setprecision(12) << "rank,g,d,zeta,complete\n";
    for (std::size_t i = 0; i < exc.ranked.size(); ++i) {
      const Excursion& e = exc.ranked[i];
      f << i + 1 << ',' << e.g << ',' << e.d << ',' << e.zeta << ','
        << (e.complete ? 1 : 0) << "\n";
    }
  }
  {
    std::ofstream f(fs::path(out) / "shortcuts.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write shortcuts.csv");
    f << std::setprecision(12) << "x,y,s,t\n";
    if (!exc.ranked.empty()) {
      const Excursion& top = exc.ranked[0];
      const auto atoms = sample_poisson_surplus(path, top, stream_seed(seed, 0xA70));
      const ShortcutSet sh = shortcuts_from_atoms(path, top, atoms);
      for (std::size_t i = 0; i < atoms.size(); ++i)
        f << atoms[i].first << ',' << atoms[i].second << ','
          << sh.pairs[i].first << ',' << sh.pairs[i].second << "\n";
    }
  }
  std::cout << num << "limits: points=" << path.points()
            << " excursions=" << exc.ranked.size()
            << " zeta1=" << (exc.ranked.empty() ? 0.0 : exc.ranked[0].zeta)
            << "\n";

  if (ghp_refine && !exc.ranked.empty()) {
    const MetricGraphSpec fine = make_metric_spec(path, exc.ranked[0], {});
    const MetricGraphSpec at_r = subsample_spec(fine, 8);
    const MetricGraphSpec at_r2 = subsample_spec(fine, 4);
    const double b_r = ghp_upper_bound(fine, at_r, at_r.resolution);
    const double b_r2 = ghp_upper_bound(fine, at_r2, at_r2.resolution);
    std::cout << num << "ghp_refine: r=" << at_r.resolution << " bound=" << b_r
              << " r/2=" << at_r2.resolution << " bound=" << b_r2
              << " decreased=" << (b_r2 < b_r ? "yes" : "no") << "\n";
  }
  if (kappa_check) {
    if (use_inf)
      throw std::invalid_argument("--kappa-check needs a finite --theta");
    const KappaCheckReport rep =
        kappa_scaling_check(lambda, theta, dt, T, 200, stream_seed(seed, 0x5C));
    std::cout << num << "kappa_check: drift_gap=" << rep.drift_gap
              << " max_mean_gap=" << rep.max_mean_gap
              << " max_var_gap=" << rep.max_var_gap << " max_ks=" << rep.max_ks
              << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"critical random intersection graph toolkit"};
  app.require_subcommand(1);

  ConfigFlags sample_flags;
  std::string dump_path;
  CLI::App* sample = app.add_subcommand("sample", "sample one instance");
  add_config_flags(sample, sample_flags);
  sample->add_option("--dump-graph", dump_path, "write the edge list here");

  ConfigFlags explore_flags;
  std::string load_path, trace_csv, root_rule = "uniform";
  CLI::App* explore = app.add_subcommand("explore", "run the exploration walk");
  add_config_flags(explore, explore_flags);
  explore->get_option("--regime")->required(false);
  explore->get_option("--n")->required(false);
  explore->add_option("--load-graph", load_path, "explore a dumped edge list");
  explore->add_option("--trace-csv", trace_csv, "write the step trace here");
  explore->add_option("--root-rule", root_rule, "uniform | smallest");

  std::string plan_path;
  std::uint32_t threads = 0, continuum_paths = 0;
  double continuum_T = 0.0;
  CLI::App* campaign = app.add_subcommand("campaign", "run an experiment plan");
  campaign->add_option("plan", plan_path, "plan JSON path")->required();
  campaign->add_option("--threads", threads, "worker threads (0 = default)");
  campaign->add_option("--continuum-paths", continuum_paths,
                       "override the number of simulated limit paths");
  campaign->add_option("--continuum-T", continuum_T,
                       "override the limit-path horizon");

  double l_theta = 1.0, l_lambda = 0.0, l_T = 10.0, l_dt = 1e-3;
  std::uint64_t l_seed = 1;
  std::string l_out;
  bool l_inf = false, l_ghp = false, l_kappa = false, l_drift = false;
  CLI::App* limits = app.add_subcommand("limits", "simulate the limit objects");
  limits->add_option("--theta", l_theta, "finite theta");
  limits->add_flag("--inf", l_inf, "infinite theta (single-noise walk)");
  limits->add_option("--lambda", l_lambda, "window location");
  limits->add_option("--T", l_T, "horizon");
  limits->add_option("--dt", l_dt, "grid step");
  limits->add_option("--seed", l_seed, "RNG seed");
  limits->add_option("--out", l_out, "output directory")->required();
  limits->add_flag("--ghp-refine", l_ghp, "report the refinement bound");
  limits->add_flag("--kappa-check", l_kappa, "report the rescaling check");
  limits->add_flag("--drift-only", l_drift, "suppress the noise terms");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("rig");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sample->parsed()) {
      finish_config_flags(sample, sample_flags);
      return cmd_sample(sample_flags, dump_path);
    }
    if (explore->parsed()) {
      finish_config_flags(explore, explore_flags);
      if (load_path.empty() && explore->count("--regime") == 0)
        throw std::invalid_argument("explore needs --regime ... or --load-graph");
      if (load_path.empty() && explore->count("--n") == 0)
        throw std::invalid_argument("explore needs --n unless --load-graph is given");
      return cmd_explore(explore_flags, load_path, trace_csv, root_rule);
    }
    if (campaign->parsed())
      return cmd_campaign(plan_path, threads, continuum_paths, continuum_T);
    if (limits->parsed())
      return cmd_limits(l_theta, l_inf, limits->count("--theta") > 0, l_lambda,
                        l_T, l_dt, l_seed, l_out, l_ghp, l_kappa, l_drift);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace rig
